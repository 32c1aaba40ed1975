#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "pglee/corpus.hpp"
#include "pglee/error.hpp"

using namespace pglee;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / ("pglee_corpus_" + name);
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("tokenize splits punctuation and keeps byte offsets") {
  const std::string text = "Ozkan, (rushed) home.";
  const auto toks = tokenize(text);
  std::vector<std::string> words;
  for (const auto& t : toks) {
    words.push_back(t.text);
    CHECK(text.substr(t.start, t.end - t.start) == t.text);
  }
  CHECK(words == std::vector<std::string>{"Ozkan", ",", "(", "rushed", ")", "home", "."});
}

TEST_CASE("tokenize offsets round-trip on fuzzed text") {
  Rng rng(11);
  const std::string alphabet = "abcXYZ019 ,.;:!?()'\"-\t";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const auto len = uniform_index(rng, 40);
    for (std::size_t i = 0; i < len; ++i) text += alphabet[uniform_index(rng, alphabet.size())];
    std::size_t prev_end = 0;
    for (const auto& t : tokenize(text)) {
      REQUIRE(t.start >= prev_end);
      REQUIRE(t.end > t.start);
      REQUIRE(text.substr(t.start, t.end - t.start) == t.text);
      prev_end = t.end;
    }
  }
}

TEST_CASE("load_corpus reads one document with a gold event") {
  const std::string s1 =
      "Palestinian security forces returned Monday to the positions they held in the Gaza Strip.";
  const auto trig = oracle::find_span(s1, "returned");
  const std::string line = R"({"doc_id":"d1","sentences":[{"sent_id":"d1-0","text":")" + s1 +
                           R"(","gold_events":[{"trigger":[)" + std::to_string(trig.start) + "," +
                           std::to_string(trig.end) + R"(],"type":"Attack","args":[]}]}]})";
  const auto docs = load_corpus(write_temp("ok.jsonl", line + "\n\n"));
  REQUIRE(docs.size() == 1);
  REQUIRE(docs[0].sentences.size() == 1);
  REQUIRE(docs[0].sentences[0].gold_events.has_value());
  REQUIRE(docs[0].sentences[0].gold_events->size() == 1);
  CHECK(docs[0].sentences[0].gold_events->at(0).type == "Attack");
  CHECK(docs[0].sentences[0].gold_events->at(0).trigger == trig);
}

TEST_CASE("out-of-range span is a data error naming line and sentence") {
  const std::string good = R"({"doc_id":"a","sentences":[{"sent_id":"a0","text":"x y"}]})";
  const std::string bad =
      R"({"doc_id":"b","sentences":[{"sent_id":"b7","text":"short","gold_events":[{"trigger":[2,40],"type":"T","args":[]}]}]})";
  try {
    load_corpus(write_temp("bad.jsonl", good + "\n" + bad + "\n"));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("b7") != std::string::npos);
    CHECK(e.exit_code() == 3);
  }
}

TEST_CASE("malformed JSON and duplicate documents are rejected") {
  CHECK_THROWS_AS(load_corpus(write_temp("junk.jsonl", "{not json\n")), DataError);
  const std::string doc = R"({"doc_id":"a","sentences":[]})";
  CHECK_THROWS_AS(load_corpus(write_temp("dup.jsonl", doc + "\n" + doc + "\n")), DataError);
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), DataError);
}

TEST_CASE("gazetteer returns the longest match") {
  const Lexicon lex({"rushed"}, {}, {"Fehmi", "Fehmi Husrev Kutlu"});
  const auto toks = tokenize("member Fehmi Husrev Kutlu rushed");
  CHECK(lex.gazetteer_match(toks, 1) == 3);
  CHECK(lex.gazetteer_match(toks, 0) == 0);
  CHECK(lex.is_verb("Rushed"));
  CHECK_FALSE(lex.is_noun("rushed"));
}

TEST_CASE("OOV vectors are deterministic unit vectors") {
  EmbeddingTable table(16, 99);
  table.insert("war", Eigen::VectorXd::Ones(16));
  CHECK(table.embed("War") == Eigen::VectorXd::Ones(16));
  const auto a = table.embed("Kutlu");
  const auto b = table.embed("kutlu");
  CHECK(a == b);
  CHECK(std::abs(a.norm() - 1.0) < 1e-12);
  CHECK(EmbeddingTable(16, 99).embed("zebra") == table.embed("zebra"));
  CHECK_FALSE(EmbeddingTable(16, 100).embed("zebra").isApprox(table.embed("zebra")));
  CHECK(table.embed_phrase("").isZero());
  CHECK(table.embed_phrase("war war").isApprox(Eigen::VectorXd::Ones(16)));
}

TEST_CASE("embedding file with header loads and dimension mismatch fails") {
  const auto ok = EmbeddingTable::load(write_temp("emb.txt", "2 3\nwar 1 2 3\nkill 0 0 1\n"), 5);
  CHECK(ok.dimension() == 3);
  CHECK(ok.size() == 2);
  CHECK(ok.embed("kill")[2] == 1.0);
  CHECK_THROWS_AS(EmbeddingTable::load(write_temp("emb_bad.txt", "war 1 2 3\nkill 0 1\n"), 5), DataError);
}
