#include "pglee/eventgraph.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <nlohmann/json.hpp>

#include "pglee/error.hpp"

namespace pglee {

const char* role_name(Role r) { return r == Role::Trigger ? "trigger" : "argument"; }

std::size_t EventGraph::add_node(Node node) {
  nodes_.push_back(std::move(node));
  adjacency_.emplace_back();
  return nodes_.size() - 1;
}

bool EventGraph::add_edge(std::size_t i, std::size_t j) {
  if (i >= nodes_.size() || j >= nodes_.size()) throw std::out_of_range("edge endpoint out of range");
  if (i == j) throw std::invalid_argument("self-loops are not allowed");
  if (nodes_[i].role == Role::Argument && nodes_[j].role == Role::Argument) {
    throw std::invalid_argument("argument-argument edges are not allowed");
  }
  auto& ni = adjacency_[i];
  auto pos = std::lower_bound(ni.begin(), ni.end(), j);
  if (pos != ni.end() && *pos == j) return false;
  ni.insert(pos, j);
  auto& nj = adjacency_[j];
  nj.insert(std::lower_bound(nj.begin(), nj.end(), i), i);
  return true;
}

bool EventGraph::has_edge(std::size_t i, std::size_t j) const {
  const auto& ni = adjacency_[i];
  return std::binary_search(ni.begin(), ni.end(), j);
}

std::vector<Edge> EventGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t a = 0; a < nodes_.size(); ++a) {
    for (std::size_t b : adjacency_[a]) {
      if (b <= a) continue;
      const bool tt = nodes_[a].role == Role::Trigger && nodes_[b].role == Role::Trigger;
      out.push_back({a, b, tt ? EdgeKind::TriggerTrigger : EdgeKind::TriggerArgument});
    }
  }
  return out;
}

std::size_t EventGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : adjacency_) twice += n.size();
  return twice / 2;
}

std::string EventGraph::to_json() const {
  nlohmann::json j;
  j["scope_id"] = scope_id_;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nlohmann::json jn = {{"role", role_name(n.role)}, {"text", n.text}};
    jn["span"] = n.span ? nlohmann::json::array({n.span->start, n.span->end}) : nlohmann::json(nullptr);
    j["nodes"].push_back(std::move(jn));
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : edges()) {
    j["edges"].push_back({e.a, e.b, e.kind == EdgeKind::TriggerTrigger ? "trigger-trigger" : "trigger-argument"});
  }
  return j.dump();
}

EventGraph build_graph(const std::vector<SentenceCandidates>& scope, const EmbeddingTable& table,
                       const std::string& scope_id) {
  using Key = std::tuple<Role, std::string, std::optional<Span>, std::string>;
  EventGraph g(scope_id);
  std::map<Key, std::size_t> index;
  auto intern = [&](Role role, const std::string& text, const std::optional<Span>& span, const std::string& src) {
    if (text.empty()) throw DataError("empty mention text in scope '" + scope_id + "'");
    Key key{role, text, span, src};
    if (auto it = index.find(key); it != index.end()) return it->second;
    Node n;
    n.role = role;
    n.text = text;
    n.span = span;
    n.source = src;
    n.embedding = table.embed_phrase(text);
    const std::size_t id = g.add_node(std::move(n));
    index.emplace(std::move(key), id);
    return id;
  };

  std::vector<std::size_t> triggers;
  for (const auto& sc : scope) {
    for (const auto& ev : sc.events) {
      const std::size_t t = intern(Role::Trigger, ev.trigger_text, ev.trigger_span, sc.sent_id);
      if (std::find(triggers.begin(), triggers.end(), t) == triggers.end()) triggers.push_back(t);
      for (const auto& arg : ev.arguments) {
        g.add_edge(t, intern(Role::Argument, arg.text, arg.span, sc.sent_id));
      }
    }
  }
  for (std::size_t a = 0; a < triggers.size(); ++a) {
    for (std::size_t b = a + 1; b < triggers.size(); ++b) g.add_edge(triggers[a], triggers[b]);
  }
  return g;
}

EventGraph build_graph(const std::vector<CandidateEvent>& events, const EmbeddingTable& table,
                       const std::string& scope_id) {
  return build_graph(std::vector<SentenceCandidates>{{scope_id, events}}, table, scope_id);
}

}  // namespace pglee
