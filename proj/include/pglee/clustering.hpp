#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pglee/eventgraph.hpp"
#include "pglee/random.hpp"

namespace pglee {

struct ClusterModel {
  Role role = Role::Trigger;
  std::size_t k = 0;
  std::vector<Eigen::VectorXd> centroids;
  std::vector<std::size_t> counts;       // per-centroid update counts
  std::vector<std::size_t> assignments;  // point index -> cluster, from the final full pass
  std::vector<double> inertia_trace;     // inertia after each iteration (not persisted)
};

struct KMeansOptions {
  std::size_t k = 1;
  std::size_t iterations = 10;
  std::size_t batch = 256;  // >= #points means full-batch
  std::uint64_t seed = 0;
  std::size_t restarts = 3;  // independent seedings; the lowest final inertia wins
};

/// Euclidean distance, accumulated in index order.
double euclidean(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Index of the nearest centroid; lowest index on ties.
std::size_t nearest_centroid(const Eigen::VectorXd& point, const std::vector<Eigen::VectorXd>& centroids);

double inertia(std::span<const Eigen::VectorXd> points, const std::vector<Eigen::VectorXd>& centroids);

/// k-means++ seeding followed by `iterations` mini-batch steps, repeated
/// `restarts` times from one RNG stream.
/// Throws std::invalid_argument if #points < k or iterations == 0.
ClusterModel minibatch_kmeans(std::span<const Eigen::VectorXd> points, const KMeansOptions& options,
                              Role role = Role::Trigger);

/// Continues mini-batch steps from the model's current centroids and counts,
/// then recomputes the full-pass assignment.
void refine(ClusterModel& model, std::span<const Eigen::VectorXd> points, std::size_t iterations,
            std::size_t batch, Rng& rng);

/// Inverse-distance membership probabilities. Distances below 1e-12 collapse
/// the mass uniformly onto the nearest such centroid(s).
std::vector<double> membership_prob(const Eigen::VectorXd& point, const ClusterModel& model);

inline constexpr double kCollapseEpsilon = 1e-12;

/// Mean silhouette coefficient. Points in singleton clusters score 0.
/// Throws std::invalid_argument when fewer than two clusters are populated.
double silhouette(std::span<const Eigen::VectorXd> points, std::span<const std::size_t> assignments);

struct SweepResult {
  std::vector<std::pair<std::size_t, double>> candidates;  // (k, silhouette)
  std::size_t best_k = 0;
};

/// Fits every k in [k_min, k_max] with the same seed and keeps the best
/// silhouette (smaller k on ties).
SweepResult sweep_k(std::span<const Eigen::VectorXd> points, std::size_t k_min, std::size_t k_max,
                    std::uint64_t seed, std::size_t iterations = 50, std::size_t batch = 1024);

std::string cluster_model_to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const std::string& text);
std::string sweep_to_json(const SweepResult& sweep);

}  // namespace pglee
