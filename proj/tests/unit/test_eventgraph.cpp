#include "doctest.h"

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "pglee/eventgraph.hpp"
#include "pglee/promptgen.hpp"

using namespace pglee;

TEST_CASE("dictator events give the expected graph") {
  const EmbeddingTable table(4, 1);
  const std::vector<CandidateEvent> events = {
      {"war", Span{51, 54}, {{"Iraqi dictator", Span{24, 38}}}},
      {"kill", Span{73, 77}, {{"children", Span{100, 108}}, {"women", Span{113, 118}}}},
  };
  const EventGraph g = build_graph(events, table, "s0");
  std::size_t triggers = 0;
  for (const auto& n : g.nodes()) triggers += n.role == Role::Trigger ? 1 : 0;
  CHECK(triggers == 2);
  CHECK(g.size() - triggers == 3);
  std::size_t ta = 0, tt = 0;
  for (const auto& e : g.edges()) (e.kind == EdgeKind::TriggerArgument ? ta : tt) += 1;
  CHECK(ta == 3);
  CHECK(tt == 1);
  const auto j = nlohmann::json::parse(g.to_json());
  CHECK(j.at("edges").size() == 4);
}

TEST_CASE("triggers of a scope form a clique") {
  const EmbeddingTable table(3, 1);
  for (std::size_t n = 1; n <= 7; ++n) {
    std::vector<CandidateEvent> events;
    for (std::size_t i = 0; i < n; ++i) events.push_back({"t" + std::to_string(i), Span{i * 3, i * 3 + 2}, {}});
    const EventGraph g = build_graph(events, table, "s");
    CHECK(g.edge_count() == n * (n - 1) / 2);
  }
}

TEST_CASE("identical mentions merge, same text in another sentence does not") {
  const EmbeddingTable table(3, 1);
  const CandidateEvent a{"attack", Span{0, 6}, {{"Baghdad", Span{10, 17}}}};
  const CandidateEvent b{"attack", Span{0, 6}, {{"Baghdad", Span{10, 17}}}};
  CHECK(build_graph(std::vector<CandidateEvent>{a, b}, table, "s").size() == 2);
  const EventGraph doc = build_graph(std::vector<SentenceCandidates>{{"s0", {a}}, {"s1", {b}}}, table, "doc");
  CHECK(doc.size() == 4);
  CHECK(doc.has_edge(0, 2));
}

TEST_CASE("edge rules") {
  EventGraph g("x");
  const auto t0 = g.add_node({Role::Trigger, "t", std::nullopt, "s", Eigen::VectorXd::Zero(2), std::nullopt});
  const auto a0 = g.add_node({Role::Argument, "a", std::nullopt, "s", Eigen::VectorXd::Zero(2), std::nullopt});
  const auto a1 = g.add_node({Role::Argument, "b", std::nullopt, "s", Eigen::VectorXd::Zero(2), std::nullopt});
  CHECK(g.add_edge(a0, t0));
  CHECK_FALSE(g.add_edge(t0, a0));
  CHECK_THROWS(g.add_edge(t0, t0));
  CHECK_THROWS(g.add_edge(a0, a1));
  CHECK(g.neighbors(t0) == std::vector<std::size_t>{a0});
  CHECK(g.neighbors(a1).empty());
}

TEST_CASE("node embedding is the mean of token vectors") {
  EmbeddingTable table(2, 1);
  table.insert("iraqi", Eigen::Vector2d(1, 0));
  table.insert("dictator", Eigen::Vector2d(0, 3));
  const EventGraph g = build_graph(std::vector<CandidateEvent>{{"war", std::nullopt, {{"Iraqi dictator", std::nullopt}}}},
                                   table, "s");
  CHECK(g.node(1).embedding.isApprox(Eigen::Vector2d(0.5, 1.5)));
}
