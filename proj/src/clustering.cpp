#include "pglee/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pglee {

double euclidean(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::size_t nearest_centroid(const Eigen::VectorXd& point, const std::vector<Eigen::VectorXd>& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = euclidean(point, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double inertia(std::span<const Eigen::VectorXd> points, const std::vector<Eigen::VectorXd>& centroids) {
  double total = 0.0;
  for (const auto& p : points) {
    const double d = euclidean(p, centroids[nearest_centroid(p, centroids)]);
    total += d * d;
  }
  return total;
}

namespace {

std::vector<Eigen::VectorXd> kmeans_plus_plus(std::span<const Eigen::VectorXd> points, std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<Eigen::VectorXd> centroids;
  centroids.push_back(points[uniform_index(rng, n)]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = euclidean(points[i], centroids[0]);
    d2[i] = d * d;
  }
  while (centroids.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = uniform_index(rng, n);
    } else {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    }
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = euclidean(points[i], centroids.back());
      d2[i] = std::min(d2[i], d * d);
    }
  }
  return centroids;
}

void reseed_empty(ClusterModel& model, std::span<const Eigen::VectorXd> points) {
  for (std::size_t c = 0; c < model.k; ++c) {
    if (model.counts[c] != 0) continue;
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = euclidean(points[i], model.centroids[nearest_centroid(points[i], model.centroids)]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    model.centroids[c] = points[far];
  }
}

}  // namespace

void refine(ClusterModel& model, std::span<const Eigen::VectorXd> points, std::size_t iterations,
            std::size_t batch, Rng& rng) {
  const std::size_t n = points.size();
  if (n < model.k) throw std::invalid_argument("fewer points than clusters");
  std::vector<std::size_t> order(n);
  std::vector<std::size_t> nearest;
  for (std::size_t it = 0; it < iterations; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t m = n;
    if (batch < n) {
      m = batch;
      for (std::size_t i = 0; i < m; ++i) std::swap(order[i], order[i + uniform_index(rng, n - i)]);
    }
    // Assignments use the centroids from the start of the iteration.
    nearest.resize(m);
    for (std::size_t b = 0; b < m; ++b) nearest[b] = nearest_centroid(points[order[b]], model.centroids);
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t c = nearest[b];
      const double eta = 1.0 / static_cast<double>(++model.counts[c]);
      model.centroids[c] += eta * (points[order[b]] - model.centroids[c]);
    }
    reseed_empty(model, points);
    model.inertia_trace.push_back(inertia(points, model.centroids));
  }
  model.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) model.assignments[i] = nearest_centroid(points[i], model.centroids);
}

ClusterModel minibatch_kmeans(std::span<const Eigen::VectorXd> points, const KMeansOptions& options, Role role) {
  if (options.k == 0) throw std::invalid_argument("k must be positive");
  if (points.size() < options.k) {
    throw std::invalid_argument("cannot fit " + std::to_string(options.k) + " clusters to " +
                                std::to_string(points.size()) + " points");
  }
  if (options.iterations == 0) throw std::invalid_argument("iterations must be positive");
  if (options.restarts == 0) throw std::invalid_argument("restarts must be positive");
  Rng rng(options.seed);
  ClusterModel best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < options.restarts; ++r) {
    ClusterModel model;
    model.role = role;
    model.k = options.k;
    model.centroids = kmeans_plus_plus(points, options.k, rng);
    model.counts.assign(options.k, 0);
    refine(model, points, options.iterations, std::max<std::size_t>(options.batch, 1), rng);
    const double score = inertia(points, model.centroids);
    if (score < best_inertia) {
      best_inertia = score;
      best = std::move(model);
    }
  }
  return best;
}

std::vector<double> membership_prob(const Eigen::VectorXd& point, const ClusterModel& model) {
  const std::size_t k = model.centroids.size();
  std::vector<double> dist(k);
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    dist[c] = euclidean(point, model.centroids[c]);
    min_d = std::min(min_d, dist[c]);
  }
  std::vector<double> p(k, 0.0);
  if (min_d < kCollapseEpsilon) {
    const auto ties = static_cast<double>(std::count(dist.begin(), dist.end(), min_d));
    for (std::size_t c = 0; c < k; ++c) p[c] = dist[c] == min_d ? 1.0 / ties : 0.0;
    return p;
  }
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) total += 1.0 / dist[c];
  for (std::size_t c = 0; c < k; ++c) p[c] = (1.0 / dist[c]) / total;
  return p;
}

double silhouette(std::span<const Eigen::VectorXd> points, std::span<const std::size_t> assignments) {
  if (points.size() != assignments.size()) throw std::invalid_argument("points/assignments size mismatch");
  const std::size_t n = points.size();
  const std::size_t k = n == 0 ? 0 : *std::max_element(assignments.begin(), assignments.end()) + 1;
  std::vector<std::size_t> sizes(k, 0);
  for (auto a : assignments) ++sizes[a];
  if (std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }) < 2) {
    throw std::invalid_argument("silhouette needs at least two populated clusters");
  }
  std::vector<double> sums(k);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = assignments[i];
    if (sizes[own] == 1) continue;  // contributes 0
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sums[assignments[j]] += euclidean(points[i], points[j]);
    }
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own && sizes[c] > 0) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

SweepResult sweep_k(std::span<const Eigen::VectorXd> points, std::size_t k_min, std::size_t k_max,
                    std::uint64_t seed, std::size_t iterations, std::size_t batch) {
  if (k_min < 2) throw std::invalid_argument("sweep k_min must be >= 2");
  if (k_max < k_min) throw std::invalid_argument("sweep k_max must be >= k_min");
  if (k_max > points.size()) throw std::invalid_argument("sweep k_max exceeds the number of points");
  SweepResult out;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const ClusterModel m = minibatch_kmeans(points, {k, iterations, batch, seed});
    double score = -1.0;
    try {
      score = silhouette(points, m.assignments);
    } catch (const std::invalid_argument&) {
      // every point landed in one cluster (duplicate points)
    }
    out.candidates.emplace_back(k, score);
    if (score > best) {
      best = score;
      out.best_k = k;
    }
  }
  return out;
}

std::string cluster_model_to_json(const ClusterModel& model) {
  nlohmann::json j;
  j["role"] = role_name(model.role);
  j["k"] = model.k;
  j["centroids"] = nlohmann::json::array();
  for (const auto& c : model.centroids) j["centroids"].push_back(std::vector<double>(c.data(), c.data() + c.size()));
  j["counts"] = model.counts;
  j["assignments"] = model.assignments;
  return j.dump();
}

ClusterModel cluster_model_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ClusterModel m;
  m.role = j.at("role").get<std::string>() == "trigger" ? Role::Trigger : Role::Argument;
  m.k = j.at("k").get<std::size_t>();
  for (const auto& row : j.at("centroids")) {
    const auto v = row.get<std::vector<double>>();
    m.centroids.emplace_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  m.counts = j.at("counts").get<std::vector<std::size_t>>();
  m.assignments = j.value("assignments", std::vector<std::size_t>{});
  if (m.centroids.size() != m.k || m.counts.size() != m.k) throw std::invalid_argument("cluster checkpoint shape mismatch");
  return m;
}

std::string sweep_to_json(const SweepResult& sweep) {
  nlohmann::json j;
  j["candidates"] = nlohmann::json::array();
  for (const auto& [k, s] : sweep.candidates) j["candidates"].push_back({{"k", k}, {"silhouette", s}});
  j["best_k"] = sweep.best_k;
  return j.dump(2);
}

}  // namespace pglee
