#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "oracles.hpp"
#include "pglee/clustering.hpp"
#include "pglee/encoder.hpp"

namespace oracle {

// A small randomized training-loss instance with fixed cluster models.
struct LossInstance {
  pglee::EncoderParams params;
  std::vector<pglee::EventGraph> graphs;
  std::vector<std::vector<pglee::NodePair>> negatives;
  pglee::ClusterModel trig;
  pglee::ClusterModel arg;
  pglee::LossConfig config;
};

inline LossInstance make_loss_instance(std::uint64_t seed, pglee::FeatureMode mode = pglee::FeatureMode::EncodedWithInput) {
  pglee::Rng rng(seed);
  LossInstance inst;
  const std::size_t d = 3 + pglee::uniform_index(rng, 3);
  const std::size_t out = 2 + pglee::uniform_index(rng, 3);
  const std::size_t heads = 1 + pglee::uniform_index(rng, 3);
  inst.params = pglee::EncoderParams::random(heads, d, out, seed * 7 + 1);
  const std::size_t ngraphs = 1 + pglee::uniform_index(rng, 2);
  for (std::size_t g = 0; g < ngraphs; ++g) {
    const std::size_t t = 1 + pglee::uniform_index(rng, 3);
    const std::size_t a = 1 + pglee::uniform_index(rng, 4);  // at most 7 nodes
    inst.graphs.push_back(random_graph(rng, t, a, d));
  }
  for (auto& g : inst.graphs) {
    pglee::encode_graph(inst.params, g);
    inst.negatives.push_back(pglee::sample_non_edges(g, rng));
  }
  inst.config.features = mode;
  inst.config.edge_weight = 0.5;
  inst.config.weight_decay = 1e-2;
  // Centroids drawn near the data so distances stay well away from zero.
  auto fit = [&](pglee::Role role) {
    const auto pts = pglee::collect_features(inst.graphs, role, mode);
    pglee::ClusterModel m;
    m.role = role;
    m.k = std::min<std::size_t>(2, pts.size());
    for (std::size_t c = 0; c < m.k; ++c) {
      m.centroids.push_back(pts[c] + random_vector(rng, static_cast<std::size_t>(pts[c].size()), 0.5));
      m.counts.push_back(1);
    }
    return m;
  };
  inst.trig = fit(pglee::Role::Trigger);
  inst.arg = fit(pglee::Role::Argument);
  return inst;
}

inline double loss_of(const LossInstance& inst, const pglee::EncoderParams& p) {
  return pglee::training_loss(p, inst.graphs, inst.negatives, {&inst.trig, &inst.arg}, inst.config).total();
}

// Largest relative error between the analytic gradient and central
// differences, with relative error |a - n| / max(1e-6, |a| + |n|).
inline double max_gradient_error(const LossInstance& inst, double step = 1e-5) {
  pglee::EncoderGradient grad;
  pglee::loss_and_gradient(inst.params, inst.graphs, inst.negatives, {&inst.trig, &inst.arg}, inst.config, grad);
  double worst = 0.0;
  pglee::EncoderParams p = inst.params;
  for (std::size_t h = 0; h < p.heads.size(); ++h) {
    for (pglee::Role role : {pglee::Role::Trigger, pglee::Role::Argument}) {
      Eigen::MatrixXd& w = p.heads[h].transform(role);
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double keep = w.data()[i];
        w.data()[i] = keep + step;
        const double up = loss_of(inst, p);
        w.data()[i] = keep - step;
        const double down = loss_of(inst, p);
        w.data()[i] = keep;
        const double numeric = (up - down) / (2.0 * step);
        const double analytic = grad[h].transform(role).data()[i];
        const double err = std::abs(analytic - numeric) / std::max(1e-6, std::abs(analytic) + std::abs(numeric));
        worst = std::max(worst, err);
      }
    }
  }
  return worst;
}

}  // namespace oracle
