#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pglee/clustering.hpp"
#include "pglee/eventgraph.hpp"

namespace pglee {

enum class Activation { ELU, LeakyReLU };

/// Role-typed transforms of one attention head, each out_dim x in_dim.
struct AttentionHead {
  Eigen::MatrixXd w_trig;
  Eigen::MatrixXd w_arg;

  const Eigen::MatrixXd& transform(Role r) const { return r == Role::Trigger ? w_trig : w_arg; }
  Eigen::MatrixXd& transform(Role r) { return r == Role::Trigger ? w_trig : w_arg; }
};

struct EncoderParams {
  std::vector<AttentionHead> heads;
  double leaky_slope = 0.2;
  Activation activation = Activation::ELU;

  /// Glorot-uniform initialisation.
  static EncoderParams random(std::size_t num_heads, std::size_t in_dim, std::size_t out_dim, std::uint64_t seed,
                              double leaky_slope = 0.2, Activation activation = Activation::ELU);

  std::size_t num_heads() const { return heads.size(); }
  std::size_t in_dim() const { return heads.empty() ? 0 : static_cast<std::size_t>(heads[0].w_trig.cols()); }
  std::size_t out_dim() const { return heads.empty() ? 0 : static_cast<std::size_t>(heads[0].w_trig.rows()); }
  double squared_norm() const;

  /// Throws std::invalid_argument when the invariants (K >= 1, shared
  /// shapes, slope in (0, 1)) do not hold.
  void validate() const;
};

using EncoderGradient = std::vector<AttentionHead>;

struct NodeAttention {
  std::vector<std::size_t> neighbors;
  std::vector<std::vector<double>> scores;  // [head][neighbor] raw e_ij
  std::vector<std::vector<double>> alpha;   // [head][neighbor]
  std::vector<double> mean_alpha;           // head-averaged
};

struct AttentionRecord {
  std::vector<NodeAttention> nodes;

  /// Head-averaged coefficient of edge i -> j, normalised over i's neighbors.
  double mean_alpha(std::size_t i, std::size_t j) const;
};

double leaky_relu(double x, double slope);
double activate(double x, Activation act, double slope);

/// Inner product of the role-selected transforms of the two node embeddings.
double score_edge(const EncoderParams& params, std::size_t head, const Node& node_i, const Node& node_j);

/// Softmax over LeakyReLU(scores), with max subtraction. Throws on empty input.
std::vector<double> normalize_attention(std::span<const double> scores, double slope);

/// One head's representation of node i; sigma(0) for isolated nodes.
Eigen::VectorXd encode_node(const EncoderParams& params, std::size_t head, std::size_t i, const EventGraph& graph);

/// Sets every node's `encoded` to the head average and returns the attention.
AttentionRecord encode_graph(const EncoderParams& params, EventGraph& graph);

// ---------------------------------------------------------------------------
// Training objective.

/// Vector a node contributes to clustering. EncodedWithInput appends the
/// node's input embedding to its encoding.
enum class FeatureMode { Encoded, EncodedWithInput };

Eigen::VectorXd cluster_feature(const Node& node, FeatureMode mode);

using NodePair = std::pair<std::size_t, std::size_t>;

/// One uniformly drawn non-adjacent pair per real edge (none if the graph is complete).
std::vector<NodePair> sample_non_edges(const EventGraph& graph, Rng& rng);

struct LossConfig {
  double edge_weight = 0.5;
  double weight_decay = 1e-4;
  FeatureMode features = FeatureMode::EncodedWithInput;
};

/// Cluster models used by the loss; either may be null when a role has no nodes.
struct ClusterModels {
  const ClusterModel* trigger = nullptr;
  const ClusterModel* argument = nullptr;
};

struct LossTerms {
  double cluster = 0.0;
  double edge = 0.0;
  double decay = 0.0;
  double total() const { return cluster + edge + decay; }
};

/// negatives[g] holds the sampled non-edges of graphs[g].
LossTerms training_loss(const EncoderParams& params, std::span<const EventGraph> graphs,
                        std::span<const std::vector<NodePair>> negatives, const ClusterModels& models,
                        const LossConfig& config);

/// Same value as training_loss plus the analytic gradient.
LossTerms loss_and_gradient(const EncoderParams& params, std::span<const EventGraph> graphs,
                            std::span<const std::vector<NodePair>> negatives, const ClusterModels& models,
                            const LossConfig& config, EncoderGradient& gradient);

struct TrainConfig {
  std::size_t epochs = 30;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  double edge_loss_weight = 0.5;
};

struct ClusterSchedule {
  std::size_t k_trig = 38;
  std::size_t k_arg = 24;
  std::size_t iterations = 10;  // mini-batch iterations per epoch
  std::size_t batch = 256;
  FeatureMode features = FeatureMode::EncodedWithInput;
};

struct TrainResult {
  EncoderParams params;
  ClusterModel trigger_model;
  ClusterModel argument_model;
  std::vector<double> epoch_loss;
};

/// Alternates encoding, mini-batch K-means and AdamW steps each epoch. Leaves
/// `graphs` encoded with the final parameters. Throws DivergenceError on a
/// non-finite loss.
TrainResult train(EncoderParams params, std::vector<EventGraph>& graphs, const TrainConfig& config,
                  const ClusterSchedule& schedule);

/// Collects the clustering features of every node of `role`, in graph order.
std::vector<Eigen::VectorXd> collect_features(std::span<const EventGraph> graphs, Role role, FeatureMode mode);

std::string encoder_to_json(const EncoderParams& params);
EncoderParams encoder_from_json(const std::string& text);

}  // namespace pglee
