#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pglee/clustering.hpp"
#include "pglee/encoder.hpp"
#include "pglee/eventgraph.hpp"

namespace pglee {

struct SchemaRole {
  std::string role_label;
  std::size_t cluster = 0;
  std::size_t support = 0;  // contributing edges
  double peak_attention = 0.0;
};

struct EventSchema {
  std::string event_type_label;
  std::size_t cluster = 0;
  std::vector<SchemaRole> argument_roles;  // by support, then cluster index
  std::vector<std::string> examples;       // scope ids, first-seen order
};

struct SchemaConfig {
  double theta = 0.3;
  std::map<std::size_t, std::string> argument_name_map;  // argument cluster -> manual label

  std::string role_label(std::size_t cluster) const;
  void validate() const;
};

struct ClusterNames {
  std::vector<std::string> labels;
  std::vector<std::string> warnings;
};

/// Names each cluster after the text of its member nearest the centroid
/// (lexicographically smallest text on ties). `points[i]`/`texts[i]` belong to
/// the item with `model.assignments[i]`.
ClusterNames name_trigger_clusters(const ClusterModel& model, std::span<const Eigen::VectorXd> points,
                                   std::span<const std::string> texts);

/// node_clusters[g][i]: cluster of node i of graph g in its role's model.
using NodeClusters = std::vector<std::vector<std::size_t>>;

/// Spreads per-role assignments (in collect_features order) back onto graph nodes.
NodeClusters node_clusters_from(std::span<const EventGraph> graphs, std::span<const std::size_t> trigger_assignments,
                                std::span<const std::size_t> argument_assignments);

/// One schema per non-empty trigger cluster. An argument cluster joins a
/// schema when any trigger-argument edge from a member trigger carries a
/// head-averaged trigger-side coefficient >= theta.
std::vector<EventSchema> induce_schemas(std::span<const EventGraph> graphs, std::span<const AttentionRecord> attention,
                                        const NodeClusters& clusters, std::size_t k_trig,
                                        std::span<const std::string> trigger_labels, const SchemaConfig& config);

std::string schemas_to_json(const std::vector<EventSchema>& schemas);

// ---------------------------------------------------------------------------
// Supervised mode.

inline constexpr const char* kUnmappedLabel = "other";

/// Maximum-weight one-to-one matching of clusters to gold labels on the
/// contingency matrix; clusters left without a label map to "other".
/// Items with no gold label are ignored.
std::vector<std::string> map_clusters_to_gold(std::span<const std::size_t> assignments,
                                              std::span<const std::optional<std::string>> gold_labels,
                                              std::size_t k);

/// Optimal assignment for a rows x cols weight matrix (rows may exceed cols or
/// vice versa). Returns, per row, the matched column or -1.
std::vector<int> max_weight_assignment(const std::vector<std::vector<long long>>& weight);

struct PredictedArgument {
  Span span;
  std::size_t role_cluster = 0;
};

struct PredictedEvent {
  Span trigger;
  std::size_t type_cluster = 0;
  std::vector<PredictedArgument> arguments;
};

struct SentencePrediction {
  std::string sent_id;
  std::vector<PredictedEvent> events;
};

struct SentenceGold {
  std::string sent_id;
  std::vector<GoldEvent> events;
};

struct LabelMapping {
  std::vector<std::string> event_types;  // trigger cluster -> label
  std::vector<std::string> roles;        // argument cluster -> label

  static std::string lookup(const std::vector<std::string>& table, std::size_t cluster) {
    return cluster < table.size() ? table[cluster] : kUnmappedLabel;
  }
};

struct PrfScore {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  void finalize();
};

struct EvalReport {
  PrfScore trig_i;
  PrfScore trig_c;
  PrfScore arg_i;
  PrfScore arg_c;

  std::string to_json() const;
};

/// Exact-offset micro-averaged scoring of Trig-I/Trig-C/Arg-I/Arg-C.
EvalReport evaluate(std::span<const SentencePrediction> predictions, std::span<const SentenceGold> gold,
                    const LabelMapping& mapping);

}  // namespace pglee
