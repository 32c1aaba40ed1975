#include "pglee/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pglee/error.hpp"

namespace pglee {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double activation_derivative(double x, Activation act, double slope) {
  if (x > 0.0) return 1.0;
  return act == Activation::ELU ? std::exp(x) : slope;
}

void check_dims(const EncoderParams& p, const Node& n) {
  if (static_cast<std::size_t>(n.embedding.size()) != p.in_dim()) {
    throw std::invalid_argument("node '" + n.text + "' embedding has length " + std::to_string(n.embedding.size()) +
                                ", encoder expects " + std::to_string(p.in_dim()));
  }
}

// Forward state of one head over a whole graph.
struct HeadCache {
  Eigen::MatrixXd z;                      // out_dim x n, transformed embeddings
  Eigen::MatrixXd u;                      // out_dim x n, pre-activation aggregates
  std::vector<std::vector<double>> e;     // raw scores per node, aligned with neighbors
  std::vector<std::vector<double>> alpha; // coefficients per node
};

HeadCache head_forward(const EncoderParams& params, std::size_t head, const EventGraph& g) {
  const auto& h = params.heads.at(head);
  const std::size_t n = g.size();
  HeadCache c;
  c.z.resize(static_cast<Eigen::Index>(params.out_dim()), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    check_dims(params, g.node(j));
    c.z.col(static_cast<Eigen::Index>(j)) = h.transform(g.node(j).role) * g.node(j).embedding;
  }
  c.u = Eigen::MatrixXd::Zero(c.z.rows(), c.z.cols());
  c.e.resize(n);
  c.alpha.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nbrs = g.neighbors(i);
    if (nbrs.empty()) continue;
    const auto zi = c.z.col(static_cast<Eigen::Index>(i));
    c.e[i].reserve(nbrs.size());
    for (std::size_t j : nbrs) c.e[i].push_back(zi.dot(c.z.col(static_cast<Eigen::Index>(j))));
    c.alpha[i] = normalize_attention(c.e[i], params.leaky_slope);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      c.u.col(static_cast<Eigen::Index>(i)) += c.alpha[i][k] * c.z.col(static_cast<Eigen::Index>(nbrs[k]));
    }
  }
  return c;
}

Eigen::MatrixXd activated(const Eigen::MatrixXd& u, const EncoderParams& p) {
  return u.unaryExpr([&](double x) { return activate(x, p.activation, p.leaky_slope); });
}

// Loss over one graph; adds to `grad` when non-null.
LossTerms graph_loss(const EncoderParams& params, const EventGraph& g, const std::vector<NodePair>& negatives,
                     const ClusterModels& models, const LossConfig& cfg, EncoderGradient* grad) {
  LossTerms terms;
  const std::size_t n = g.size();
  if (n == 0) return terms;
  const std::size_t K = params.num_heads();
  const auto dout = static_cast<Eigen::Index>(params.out_dim());

  std::vector<HeadCache> caches;
  caches.reserve(K);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dout, static_cast<Eigen::Index>(n));
  for (std::size_t l = 0; l < K; ++l) {
    caches.push_back(head_forward(params, l, g));
    H += activated(caches.back().u, params);
  }
  H /= static_cast<double>(K);

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dout, static_cast<Eigen::Index>(n));

  // Inverse-distance membership of each node in its nearest cluster.
  for (std::size_t i = 0; i < n; ++i) {
    const Node& node = g.node(i);
    const ClusterModel* model = node.role == Role::Trigger ? models.trigger : models.argument;
    if (model == nullptr || model->centroids.empty()) continue;
    Eigen::VectorXd f(H.rows() + (cfg.features == FeatureMode::EncodedWithInput ? node.embedding.size() : 0));
    f.head(H.rows()) = H.col(static_cast<Eigen::Index>(i));
    if (cfg.features == FeatureMode::EncodedWithInput) f.tail(node.embedding.size()) = node.embedding;

    const std::size_t k = model->centroids.size();
    std::vector<double> dist(k);
    for (std::size_t c = 0; c < k; ++c) dist[c] = euclidean(f, model->centroids[c]);
    const std::size_t t = nearest_centroid(f, model->centroids);
    if (dist[t] < kCollapseEpsilon) continue;  // p = 1
    double inv_sum = 0.0;
    for (double d : dist) inv_sum += 1.0 / d;
    terms.cluster += std::log(dist[t]) + std::log(inv_sum);
    if (grad) {
      Eigen::VectorXd gf = (f - model->centroids[t]) / (dist[t] * dist[t]);
      for (std::size_t c = 0; c < k; ++c) gf -= (f - model->centroids[c]) / (inv_sum * dist[c] * dist[c] * dist[c]);
      G.col(static_cast<Eigen::Index>(i)) += gf.head(H.rows());
    }
  }

  // Edge reconstruction with negative samples.
  auto pair_term = [&](std::size_t a, std::size_t b, bool positive) {
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    const double x = H.col(ia).dot(H.col(ib));
    terms.edge += cfg.edge_weight * (positive ? softplus(-x) : softplus(x));
    if (grad) {
      const double coef = cfg.edge_weight * (positive ? sigmoid(x) - 1.0 : sigmoid(x));
      G.col(ia) += coef * H.col(ib);
      G.col(ib) += coef * H.col(ia);
    }
  };
  if (cfg.edge_weight != 0.0) {
    for (const Edge& e : g.edges()) pair_term(e.a, e.b, true);
    for (const auto& [a, b] : negatives) pair_term(a, b, false);
  }

  if (!grad) return terms;

  for (std::size_t l = 0; l < K; ++l) {
    const HeadCache& c = caches[l];
    Eigen::MatrixXd Gu = G / static_cast<double>(K);
    for (Eigen::Index col = 0; col < Gu.cols(); ++col) {
      for (Eigen::Index r = 0; r < Gu.rows(); ++r) {
        Gu(r, col) *= activation_derivative(c.u(r, col), params.activation, params.leaky_slope);
      }
    }
    Eigen::MatrixXd Gz = Eigen::MatrixXd::Zero(c.z.rows(), c.z.cols());
    std::vector<double> g_alpha;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& nbrs = g.neighbors(i);
      if (nbrs.empty()) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      g_alpha.assign(nbrs.size(), 0.0);
      double weighted = 0.0;
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        const auto jj = static_cast<Eigen::Index>(nbrs[k]);
        Gz.col(jj) += c.alpha[i][k] * Gu.col(ii);
        g_alpha[k] = Gu.col(ii).dot(c.z.col(jj));
        weighted += c.alpha[i][k] * g_alpha[k];
      }
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        const auto jj = static_cast<Eigen::Index>(nbrs[k]);
        const double g_s = c.alpha[i][k] * (g_alpha[k] - weighted);
        const double g_e = g_s * (c.e[i][k] > 0.0 ? 1.0 : params.leaky_slope);
        Gz.col(ii) += g_e * c.z.col(jj);
        Gz.col(jj) += g_e * c.z.col(ii);
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      (*grad)[l].transform(g.node(j).role) += Gz.col(static_cast<Eigen::Index>(j)) * g.node(j).embedding.transpose();
    }
  }
  return terms;
}

LossTerms batch_loss(const EncoderParams& params, const std::vector<const EventGraph*>& graphs,
                     const std::vector<const std::vector<NodePair>*>& negatives, const ClusterModels& models,
                     const LossConfig& cfg, EncoderGradient* grad) {
  if (grad) {
    grad->clear();
    for (const auto& h : params.heads) {
      grad->push_back({Eigen::MatrixXd::Zero(h.w_trig.rows(), h.w_trig.cols()),
                       Eigen::MatrixXd::Zero(h.w_arg.rows(), h.w_arg.cols())});
    }
  }
  LossTerms total;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const LossTerms t = graph_loss(params, *graphs[gi], *negatives[gi], models, cfg, grad);
    total.cluster += t.cluster;
    total.edge += t.edge;
  }
  total.decay = 0.5 * cfg.weight_decay * params.squared_norm();
  if (grad && cfg.weight_decay != 0.0) {
    for (std::size_t l = 0; l < params.heads.size(); ++l) {
      (*grad)[l].w_trig += cfg.weight_decay * params.heads[l].w_trig;
      (*grad)[l].w_arg += cfg.weight_decay * params.heads[l].w_arg;
    }
  }
  return total;
}

LossTerms span_loss(const EncoderParams& params, std::span<const EventGraph> graphs,
                    std::span<const std::vector<NodePair>> negatives, const ClusterModels& models,
                    const LossConfig& cfg, EncoderGradient* grad) {
  if (negatives.size() != graphs.size()) throw std::invalid_argument("one negative-sample list per graph required");
  std::vector<const EventGraph*> gp;
  std::vector<const std::vector<NodePair>*> np;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    gp.push_back(&graphs[i]);
    np.push_back(&negatives[i]);
  }
  return batch_loss(params, gp, np, models, cfg, grad);
}

// Decoupled-weight-decay Adam.
class AdamW {
 public:
  AdamW(const EncoderParams& p, double lr, double wd) : lr_(lr), wd_(wd) {
    for (const auto& h : p.heads) {
      m_.push_back({Eigen::MatrixXd::Zero(h.w_trig.rows(), h.w_trig.cols()),
                    Eigen::MatrixXd::Zero(h.w_arg.rows(), h.w_arg.cols())});
    }
    v_ = m_;
  }

  void step(EncoderParams& p, const EncoderGradient& g) {
    ++t_;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t l = 0; l < p.heads.size(); ++l) {
      for (Role r : {Role::Trigger, Role::Argument}) {
        Eigen::MatrixXd& w = p.heads[l].transform(r);
        Eigen::MatrixXd& m = m_[l].transform(r);
        Eigen::MatrixXd& v = v_[l].transform(r);
        const Eigen::MatrixXd& gr = g[l].transform(r);
        m = kBeta1 * m + (1.0 - kBeta1) * gr;
        v = kBeta2 * v + (1.0 - kBeta2) * gr.cwiseProduct(gr);
        const Eigen::MatrixXd update =
            (m / bc1).array() / ((v / bc2).array().sqrt() + kEps) + wd_ * w.array();
        w -= lr_ * update;
      }
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  double lr_;
  double wd_;
  long t_ = 0;
  EncoderGradient m_;
  EncoderGradient v_;
};

void fit_or_refine(ClusterModel& model, bool fresh, std::span<const Eigen::VectorXd> points, std::size_t k,
                   const ClusterSchedule& s, Role role, Rng& rng) {
  if (points.empty()) {
    model = ClusterModel{};
    model.role = role;
    return;
  }
  if (points.size() < k) {
    throw std::invalid_argument(std::string("only ") + std::to_string(points.size()) + " " + role_name(role) +
                                " nodes for k = " + std::to_string(k));
  }
  if (fresh) {
    model = minibatch_kmeans(points, {k, s.iterations, s.batch, rng()}, role);
  } else {
    refine(model, points, s.iterations, std::max<std::size_t>(s.batch, 1), rng);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

EncoderParams EncoderParams::random(std::size_t num_heads, std::size_t in_dim, std::size_t out_dim,
                                    std::uint64_t seed, double leaky_slope, Activation activation) {
  EncoderParams p;
  p.leaky_slope = leaky_slope;
  p.activation = activation;
  Rng rng(seed);
  const double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  auto init = [&] {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = (2.0 * uniform01(rng) - 1.0) * limit;
    }
    return m;
  };
  for (std::size_t l = 0; l < num_heads; ++l) {
    AttentionHead h;
    h.w_trig = init();
    h.w_arg = init();
    p.heads.push_back(std::move(h));
  }
  p.validate();
  return p;
}

double EncoderParams::squared_norm() const {
  double s = 0.0;
  for (const auto& h : heads) s += h.w_trig.squaredNorm() + h.w_arg.squaredNorm();
  return s;
}

void EncoderParams::validate() const {
  if (heads.empty()) throw std::invalid_argument("encoder needs at least one head");
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) throw std::invalid_argument("leaky_slope must lie in (0, 1)");
  const auto rows = heads[0].w_trig.rows();
  const auto cols = heads[0].w_trig.cols();
  if (rows == 0 || cols == 0) throw std::invalid_argument("encoder dimensions must be positive");
  for (const auto& h : heads) {
    if (h.w_trig.rows() != rows || h.w_trig.cols() != cols || h.w_arg.rows() != rows || h.w_arg.cols() != cols) {
      throw std::invalid_argument("all head matrices must share one shape");
    }
  }
}

double AttentionRecord::mean_alpha(std::size_t i, std::size_t j) const {
  const auto& na = nodes.at(i);
  auto it = std::lower_bound(na.neighbors.begin(), na.neighbors.end(), j);
  if (it == na.neighbors.end() || *it != j) throw std::out_of_range("no edge between the given nodes");
  return na.mean_alpha[static_cast<std::size_t>(it - na.neighbors.begin())];
}

double leaky_relu(double x, double slope) { return x > 0.0 ? x : slope * x; }

double activate(double x, Activation act, double slope) {
  if (x > 0.0) return x;
  return act == Activation::ELU ? std::expm1(x) : slope * x;
}

double score_edge(const EncoderParams& params, std::size_t head, const Node& node_i, const Node& node_j) {
  if (head >= params.num_heads()) throw std::out_of_range("head index out of range");
  check_dims(params, node_i);
  check_dims(params, node_j);
  const auto& h = params.heads[head];
  const Eigen::VectorXd zi = h.transform(node_i.role) * node_i.embedding;
  const Eigen::VectorXd zj = h.transform(node_j.role) * node_j.embedding;
  return zi.dot(zj);
}

std::vector<double> normalize_attention(std::span<const double> scores, double slope) {
  if (scores.empty()) throw std::invalid_argument("attention over an empty neighbor set");
  std::vector<double> out(scores.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < scores.size(); ++k) {
    out[k] = leaky_relu(scores[k], slope);
    mx = std::max(mx, out[k]);
  }
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : out) v /= sum;
  return out;
}

Eigen::VectorXd encode_node(const EncoderParams& params, std::size_t head, std::size_t i, const EventGraph& graph) {
  if (head >= params.num_heads()) throw std::out_of_range("head index out of range");
  const HeadCache c = head_forward(params, head, graph);
  return c.u.col(static_cast<Eigen::Index>(i))
      .unaryExpr([&](double x) { return activate(x, params.activation, params.leaky_slope); });
}

AttentionRecord encode_graph(const EncoderParams& params, EventGraph& graph) {
  const std::size_t n = graph.size();
  const std::size_t K = params.num_heads();
  AttentionRecord rec;
  rec.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rec.nodes[i].neighbors = graph.neighbors(i);
    rec.nodes[i].mean_alpha.assign(graph.neighbors(i).size(), 0.0);
  }
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(params.out_dim()), static_cast<Eigen::Index>(n));
  for (std::size_t l = 0; l < K; ++l) {
    HeadCache c = head_forward(params, l, graph);
    H += activated(c.u, params);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < c.alpha[i].size(); ++k) rec.nodes[i].mean_alpha[k] += c.alpha[i][k];
      rec.nodes[i].scores.push_back(std::move(c.e[i]));
      rec.nodes[i].alpha.push_back(std::move(c.alpha[i]));
    }
  }
  H /= static_cast<double>(K);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& a : rec.nodes[i].mean_alpha) a /= static_cast<double>(K);
    graph.node(i).encoded = H.col(static_cast<Eigen::Index>(i));
  }
  return rec;
}

Eigen::VectorXd cluster_feature(const Node& node, FeatureMode mode) {
  if (!node.encoded) throw std::logic_error("node '" + node.text + "' has not been encoded");
  if (mode == FeatureMode::Encoded) return *node.encoded;
  Eigen::VectorXd f(node.encoded->size() + node.embedding.size());
  f << *node.encoded, node.embedding;
  return f;
}

std::vector<NodePair> sample_non_edges(const EventGraph& graph, Rng& rng) {
  const std::size_t edges = graph.edge_count();
  std::vector<NodePair> candidates;
  for (std::size_t a = 0; a < graph.size(); ++a) {
    for (std::size_t b = a + 1; b < graph.size(); ++b) {
      if (!graph.has_edge(a, b)) candidates.emplace_back(a, b);
    }
  }
  std::vector<NodePair> out;
  if (candidates.empty()) return out;
  out.reserve(edges);
  for (std::size_t e = 0; e < edges; ++e) out.push_back(candidates[uniform_index(rng, candidates.size())]);
  return out;
}

LossTerms training_loss(const EncoderParams& params, std::span<const EventGraph> graphs,
                        std::span<const std::vector<NodePair>> negatives, const ClusterModels& models,
                        const LossConfig& config) {
  return span_loss(params, graphs, negatives, models, config, nullptr);
}

LossTerms loss_and_gradient(const EncoderParams& params, std::span<const EventGraph> graphs,
                            std::span<const std::vector<NodePair>> negatives, const ClusterModels& models,
                            const LossConfig& config, EncoderGradient& gradient) {
  return span_loss(params, graphs, negatives, models, config, &gradient);
}

std::vector<Eigen::VectorXd> collect_features(std::span<const EventGraph> graphs, Role role, FeatureMode mode) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& g : graphs) {
    for (const auto& n : g.nodes()) {
      if (n.role == role) out.push_back(cluster_feature(n, mode));
    }
  }
  return out;
}

TrainResult train(EncoderParams params, std::vector<EventGraph>& graphs, const TrainConfig& config,
                  const ClusterSchedule& schedule) {
  if (graphs.empty()) throw std::invalid_argument("training needs at least one graph");
  if (config.epochs == 0) throw std::invalid_argument("epochs must be >= 1");
  if (config.batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  if (config.learning_rate < 0.0 || config.weight_decay < 0.0) throw std::invalid_argument("rates must be >= 0");
  params.validate();

  Rng rng(config.seed);
  TrainResult result;
  AdamW optimizer(params, config.learning_rate, config.weight_decay);
  // Weight decay is applied by the optimizer, so the gradient excludes it.
  const LossConfig grad_cfg{config.edge_loss_weight, 0.0, schedule.features};

  std::vector<std::size_t> order(graphs.size());
  EncoderGradient grad;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (auto& g : graphs) encode_graph(params, g);
    const auto trig_pts = collect_features(graphs, Role::Trigger, schedule.features);
    const auto arg_pts = collect_features(graphs, Role::Argument, schedule.features);
    fit_or_refine(result.trigger_model, epoch == 0, trig_pts, schedule.k_trig, schedule, Role::Trigger, rng);
    fit_or_refine(result.argument_model, epoch == 0, arg_pts, schedule.k_arg, schedule, Role::Argument, rng);
    const ClusterModels models{&result.trigger_model, &result.argument_model};

    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      std::vector<const EventGraph*> batch;
      std::vector<std::vector<NodePair>> negs;
      for (std::size_t b = start; b < stop; ++b) {
        batch.push_back(&graphs[order[b]]);
        negs.push_back(sample_non_edges(graphs[order[b]], rng));
      }
      std::vector<const std::vector<NodePair>*> neg_ptrs;
      for (const auto& v : negs) neg_ptrs.push_back(&v);
      const LossTerms terms = batch_loss(params, batch, neg_ptrs, models, grad_cfg, &grad);
      if (!std::isfinite(terms.total())) {
        throw DivergenceError("training loss became non-finite in epoch " + std::to_string(epoch + 1) +
                              " (cluster term " + std::to_string(terms.cluster) + ", edge term " +
                              std::to_string(terms.edge) + ")");
      }
      epoch_loss += terms.total();
      optimizer.step(params, grad);
    }
    epoch_loss += 0.5 * config.weight_decay * params.squared_norm();
    if (!std::isfinite(epoch_loss) || !std::isfinite(params.squared_norm())) {
      throw DivergenceError("parameters diverged in epoch " + std::to_string(epoch + 1));
    }
    result.epoch_loss.push_back(epoch_loss);
  }

  for (auto& g : graphs) encode_graph(params, g);
  const auto trig_pts = collect_features(graphs, Role::Trigger, schedule.features);
  const auto arg_pts = collect_features(graphs, Role::Argument, schedule.features);
  fit_or_refine(result.trigger_model, false, trig_pts, schedule.k_trig, schedule, Role::Trigger, rng);
  fit_or_refine(result.argument_model, false, arg_pts, schedule.k_arg, schedule, Role::Argument, rng);
  result.params = std::move(params);
  return result;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  }
  return flat;
}

Eigen::MatrixXd matrix_from(const nlohmann::json& j, std::size_t rows, std::size_t cols) {
  const auto flat = j.get<std::vector<double>>();
  if (flat.size() != rows * cols) throw std::invalid_argument("encoder checkpoint matrix has wrong size");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * cols + c];
  }
  return m;
}

}  // namespace

std::string encoder_to_json(const EncoderParams& params) {
  nlohmann::json j;
  j["format"] = "pglee-encoder";
  j["version"] = 1;
  j["heads"] = params.num_heads();
  j["in_dim"] = params.in_dim();
  j["out_dim"] = params.out_dim();
  j["leaky_slope"] = params.leaky_slope;
  j["activation"] = params.activation == Activation::ELU ? "elu" : "leaky_relu";
  j["weights"] = nlohmann::json::array();
  for (const auto& h : params.heads) {
    j["weights"].push_back({{"trigger", matrix_json(h.w_trig)}, {"argument", matrix_json(h.w_arg)}});
  }
  return j.dump();
}

EncoderParams encoder_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("format", "") != "pglee-encoder" || j.value("version", 0) != 1) {
    throw std::invalid_argument("not a version-1 encoder checkpoint");
  }
  EncoderParams p;
  p.leaky_slope = j.at("leaky_slope").get<double>();
  const auto act = j.at("activation").get<std::string>();
  if (act == "elu") {
    p.activation = Activation::ELU;
  } else if (act == "leaky_relu") {
    p.activation = Activation::LeakyReLU;
  } else {
    throw std::invalid_argument("unknown activation '" + act + "'");
  }
  const auto in = j.at("in_dim").get<std::size_t>();
  const auto out = j.at("out_dim").get<std::size_t>();
  for (const auto& w : j.at("weights")) {
    p.heads.push_back({matrix_from(w.at("trigger"), out, in), matrix_from(w.at("argument"), out, in)});
  }
  if (p.heads.size() != j.at("heads").get<std::size_t>()) throw std::invalid_argument("head count mismatch");
  p.validate();
  return p;
}

}  // namespace pglee
