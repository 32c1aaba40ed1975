#include "pglee/schema.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace pglee {

std::string SchemaConfig::role_label(std::size_t cluster) const {
  if (auto it = argument_name_map.find(cluster); it != argument_name_map.end()) return it->second;
  return "role-" + std::to_string(cluster);
}

void SchemaConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
}

ClusterNames name_trigger_clusters(const ClusterModel& model, std::span<const Eigen::VectorXd> points,
                                   std::span<const std::string> texts) {
  if (points.size() != model.assignments.size() || texts.size() != points.size()) {
    throw std::invalid_argument("naming needs one point and text per assignment");
  }
  ClusterNames out;
  std::vector<double> best_d(model.k, std::numeric_limits<double>::infinity());
  std::vector<const std::string*> best(model.k, nullptr);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t c = model.assignments[i];
    const double d = euclidean(points[i], model.centroids[c]);
    if (d < best_d[c] || (d == best_d[c] && texts[i] < *best[c])) {
      best_d[c] = d;
      best[c] = &texts[i];
    }
  }
  out.labels.resize(model.k);
  for (std::size_t c = 0; c < model.k; ++c) {
    if (best[c]) {
      out.labels[c] = *best[c];
    } else {
      out.labels[c] = "cluster-" + std::to_string(c);
      out.warnings.push_back("cluster " + std::to_string(c) + " has no members");
    }
  }
  return out;
}

NodeClusters node_clusters_from(std::span<const EventGraph> graphs, std::span<const std::size_t> trigger_assignments,
                                std::span<const std::size_t> argument_assignments) {
  NodeClusters out(graphs.size());
  std::size_t ti = 0;
  std::size_t ai = 0;
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    for (const auto& n : graphs[g].nodes()) {
      if (n.role == Role::Trigger) {
        if (ti >= trigger_assignments.size()) throw std::invalid_argument("too few trigger assignments");
        out[g].push_back(trigger_assignments[ti++]);
      } else {
        if (ai >= argument_assignments.size()) throw std::invalid_argument("too few argument assignments");
        out[g].push_back(argument_assignments[ai++]);
      }
    }
  }
  if (ti != trigger_assignments.size() || ai != argument_assignments.size()) {
    throw std::invalid_argument("assignment count does not match graph nodes");
  }
  return out;
}

std::vector<EventSchema> induce_schemas(std::span<const EventGraph> graphs, std::span<const AttentionRecord> attention,
                                        const NodeClusters& clusters, std::size_t k_trig,
                                        std::span<const std::string> trigger_labels, const SchemaConfig& config) {
  config.validate();
  if (attention.size() != graphs.size() || clusters.size() != graphs.size()) {
    throw std::invalid_argument("one attention record and cluster list per graph required");
  }
  struct Acc {
    bool populated = false;
    std::map<std::size_t, SchemaRole> roles;
    std::vector<std::string> examples;
  };
  std::vector<Acc> acc(k_trig);
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    const EventGraph& graph = graphs[g];
    for (std::size_t i = 0; i < graph.size(); ++i) {
      if (graph.node(i).role != Role::Trigger) continue;
      const std::size_t t = clusters[g].at(i);
      if (t >= k_trig) throw std::out_of_range("trigger cluster index out of range");
      Acc& a = acc[t];
      a.populated = true;
      if (std::find(a.examples.begin(), a.examples.end(), graph.scope_id()) == a.examples.end()) {
        a.examples.push_back(graph.scope_id());
      }
      const NodeAttention& na = attention[g].nodes.at(i);
      for (std::size_t k = 0; k < na.neighbors.size(); ++k) {
        const std::size_t j = na.neighbors[k];
        if (graph.node(j).role != Role::Argument) continue;
        const double alpha = na.mean_alpha[k];
        if (alpha < config.theta) continue;
        const std::size_t r = clusters[g].at(j);
        SchemaRole& role = a.roles[r];
        if (role.support == 0) {
          role.cluster = r;
          role.role_label = config.role_label(r);
        }
        ++role.support;
        role.peak_attention = std::max(role.peak_attention, alpha);
      }
    }
  }
  std::vector<EventSchema> out;
  for (std::size_t t = 0; t < k_trig; ++t) {
    if (!acc[t].populated) continue;
    EventSchema s;
    s.cluster = t;
    s.event_type_label = t < trigger_labels.size() ? trigger_labels[t] : "cluster-" + std::to_string(t);
    for (auto& [r, role] : acc[t].roles) s.argument_roles.push_back(role);
    std::stable_sort(s.argument_roles.begin(), s.argument_roles.end(),
                     [](const SchemaRole& x, const SchemaRole& y) { return x.support > y.support; });
    s.examples = std::move(acc[t].examples);
    out.push_back(std::move(s));
  }
  return out;
}

std::string schemas_to_json(const std::vector<EventSchema>& schemas) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : schemas) {
    nlohmann::json roles = nlohmann::json::array();
    for (const auto& r : s.argument_roles) {
      roles.push_back(
          {{"role", r.role_label}, {"cluster", r.cluster}, {"support", r.support}, {"peak_attention", r.peak_attention}});
    }
    j.push_back({{"event_type", s.event_type_label}, {"cluster", s.cluster}, {"roles", roles}, {"examples", s.examples}});
  }
  return j.dump(2);
}

// ---------------------------------------------------------------------------

std::vector<int> max_weight_assignment(const std::vector<std::vector<long long>>& weight) {
  const std::size_t rows = weight.size();
  const std::size_t cols = rows == 0 ? 0 : weight[0].size();
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return {};
  long long max_w = 0;
  for (const auto& row : weight) {
    if (row.size() != cols) throw std::invalid_argument("ragged weight matrix");
    for (long long w : row) max_w = std::max(max_w, w);
  }
  // Square min-cost problem; padding cells cost max_w (weight 0).
  auto cost = [&](std::size_t i, std::size_t j) -> long long {
    return (i < rows && j < cols) ? max_w - weight[i][j] : max_w;
  };
  // Shortest augmenting path Hungarian algorithm, 1-based with sentinel column 0.
  const long long inf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<long long> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      long long delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const long long cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = p[j];
    if (i >= 1 && i <= rows && j <= cols) match[i - 1] = static_cast<int>(j - 1);
  }
  return match;
}

std::vector<std::string> map_clusters_to_gold(std::span<const std::size_t> assignments,
                                              std::span<const std::optional<std::string>> gold_labels,
                                              std::size_t k) {
  if (assignments.size() != gold_labels.size()) throw std::invalid_argument("assignments/labels size mismatch");
  std::vector<std::string> labels;
  std::unordered_map<std::string, std::size_t> label_index;
  for (const auto& l : gold_labels) {
    if (l && label_index.emplace(*l, labels.size()).second) labels.push_back(*l);
  }
  std::vector<std::string> out(k, kUnmappedLabel);
  if (labels.empty() || k == 0) return out;
  std::vector<std::vector<long long>> weight(k, std::vector<long long>(labels.size(), 0));
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (!gold_labels[i]) continue;
    if (assignments[i] >= k) throw std::out_of_range("cluster index out of range");
    ++weight[assignments[i]][label_index.at(*gold_labels[i])];
  }
  const auto match = max_weight_assignment(weight);
  for (std::size_t c = 0; c < k; ++c) {
    if (match[c] >= 0) out[c] = labels[static_cast<std::size_t>(match[c])];
  }
  return out;
}

// ---------------------------------------------------------------------------

void PrfScore::finalize() {
  precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  // Same value as 2PR / (P + R), with one rounding step.
  f1 = tp == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
}

std::string EvalReport::to_json() const {
  auto score = [](const PrfScore& s) {
    return nlohmann::json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
                          {"tp", s.tp},               {"fp", s.fp},         {"fn", s.fn}};
  };
  nlohmann::json j = {
      {"Trig-I", score(trig_i)}, {"Trig-C", score(trig_c)}, {"Arg-I", score(arg_i)}, {"Arg-C", score(arg_c)}};
  return j.dump(2);
}

namespace {

// Greedy one-to-one matching under an equivalence predicate; with exact-key
// equality this is maximum per key class. Returns matched gold index per pred.
template <typename P, typename G, typename Eq>
std::vector<int> greedy_match(const std::vector<P>& preds, const std::vector<G>& gold, Eq eq) {
  std::vector<int> match(preds.size(), -1);
  std::vector<bool> taken(gold.size(), false);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (!taken[g] && eq(preds[p], gold[g])) {
        taken[g] = true;
        match[p] = static_cast<int>(g);
        break;
      }
    }
  }
  return match;
}

std::size_t matched(const std::vector<int>& m) {
  return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](int x) { return x >= 0; }));
}

}  // namespace

EvalReport evaluate(std::span<const SentencePrediction> predictions, std::span<const SentenceGold> gold,
                    const LabelMapping& mapping) {
  EvalReport rep;
  std::unordered_map<std::string, const SentencePrediction*> by_id;
  for (const auto& p : predictions) by_id[p.sent_id] = &p;
  const std::vector<PredictedEvent> none;
  std::unordered_map<std::string, bool> seen_gold;

  auto score_sentence = [&](const std::vector<PredictedEvent>& pe, const std::vector<GoldEvent>& ge) {
    const auto trig_i = greedy_match(pe, ge, [](const PredictedEvent& p, const GoldEvent& g) { return p.trigger == g.trigger; });
    const auto trig_c = greedy_match(pe, ge, [&](const PredictedEvent& p, const GoldEvent& g) {
      return p.trigger == g.trigger && LabelMapping::lookup(mapping.event_types, p.type_cluster) == g.type;
    });
    rep.trig_i.tp += matched(trig_i);
    rep.trig_c.tp += matched(trig_c);
    for (auto* s : {&rep.trig_i, &rep.trig_c}) {
      s->fp += pe.size();
      s->fn += ge.size();
    }

    std::size_t pred_args = 0;
    std::size_t gold_args = 0;
    for (const auto& p : pe) pred_args += p.arguments.size();
    for (const auto& g : ge) gold_args += g.arguments.size();
    for (std::size_t p = 0; p < pe.size(); ++p) {
      if (trig_i[p] < 0) continue;
      const GoldEvent& g = ge[static_cast<std::size_t>(trig_i[p])];
      const auto ai = greedy_match(pe[p].arguments, g.arguments,
                                   [](const PredictedArgument& a, const GoldArgument& b) { return a.span == b.span; });
      const auto ac = greedy_match(pe[p].arguments, g.arguments, [&](const PredictedArgument& a, const GoldArgument& b) {
        return a.span == b.span && LabelMapping::lookup(mapping.roles, a.role_cluster) == b.role;
      });
      rep.arg_i.tp += matched(ai);
      rep.arg_c.tp += matched(ac);
    }
    for (auto* s : {&rep.arg_i, &rep.arg_c}) {
      s->fp += pred_args;
      s->fn += gold_args;
    }
  };

  for (const auto& g : gold) {
    seen_gold[g.sent_id] = true;
    auto it = by_id.find(g.sent_id);
    score_sentence(it == by_id.end() ? none : it->second->events, g.events);
  }
  for (const auto& p : predictions) {
    if (!seen_gold.count(p.sent_id)) score_sentence(p.events, {});
  }
  // fp/fn were accumulated as totals; convert to residuals.
  for (auto* s : {&rep.trig_i, &rep.trig_c, &rep.arg_i, &rep.arg_c}) {
    s->fp -= s->tp;
    s->fn -= s->tp;
    s->finalize();
  }
  return rep;
}

}  // namespace pglee
