#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pglee/corpus.hpp"
#include "pglee/promptgen.hpp"

namespace pglee {

enum class Role { Trigger, Argument };

const char* role_name(Role r);

enum class EdgeKind { TriggerArgument, TriggerTrigger };

struct Node {
  Role role = Role::Trigger;
  std::string text;
  std::optional<Span> span;
  std::string source;  // sentence the mention came from
  Eigen::VectorXd embedding;
  std::optional<Eigen::VectorXd> encoded;
};

struct Edge {
  std::size_t a;  // a < b
  std::size_t b;
  EdgeKind kind;
};

/// Candidate mentions of one sentence, tagged with the sentence id.
struct SentenceCandidates {
  std::string sent_id;
  std::vector<CandidateEvent> events;
};

// Heterogeneous event graph: trigger and argument nodes, intra-event
// trigger-argument edges, and a complete graph over the triggers of a scope.
class EventGraph {
 public:
  EventGraph() = default;
  explicit EventGraph(std::string scope_id) : scope_id_(std::move(scope_id)) {}

  std::size_t add_node(Node node);
  /// Adds an undirected edge; rejects self-loops and argument-argument pairs.
  /// Returns false if the edge already existed.
  bool add_edge(std::size_t i, std::size_t j);

  const std::string& scope_id() const { return scope_id_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::vector<Node>& nodes() { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  Node& node(std::size_t i) { return nodes_[i]; }

  /// Sorted neighbor indices of node i.
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_[i]; }
  bool has_edge(std::size_t i, std::size_t j) const;

  /// Each undirected edge once, ordered by (a, b).
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  /// Debug dump: {"scope_id", "nodes": [{role, text, span}], "edges": [[a, b, kind]]}.
  std::string to_json() const;

 private:
  std::string scope_id_;
  std::vector<Node> nodes_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Builds one graph covering all `scope` sentences. Identical
/// (role, text, span, sentence) mentions merge into a single node.
EventGraph build_graph(const std::vector<SentenceCandidates>& scope, const EmbeddingTable& table,
                       const std::string& scope_id);

/// Convenience overload for a single sentence's events.
EventGraph build_graph(const std::vector<CandidateEvent>& events, const EmbeddingTable& table,
                       const std::string& scope_id);

}  // namespace pglee
