#include "pglee/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pglee/error.hpp"

namespace pglee {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Span read_span(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
    throw DataError("span must be [start, end] with non-negative integers");
  }
  return Span{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r\n");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

std::string joined_key(const std::vector<Token>& tokens, std::size_t pos, std::size_t len) {
  std::string key;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (i != pos) key += ' ';
    key += to_lower(tokens[i].text);
  }
  return key;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    if (i >= n) break;
    std::size_t chunk_end = i;
    while (chunk_end < n && !is_space(text[chunk_end])) ++chunk_end;

    std::size_t lo = i;
    std::size_t hi = chunk_end;
    while (lo < hi && is_punct(text[lo])) ++lo;
    while (hi > lo && is_punct(text[hi - 1])) --hi;

    for (std::size_t p = i; p < lo; ++p) tokens.push_back({std::string(1, text[p]), p, p + 1});
    if (lo < hi) tokens.push_back({std::string(text.substr(lo, hi - lo)), lo, hi});
    for (std::size_t p = hi; p < chunk_end; ++p) tokens.push_back({std::string(1, text[p]), p, p + 1});
    i = chunk_end;
  }
  return tokens;
}

void validate_sentence(const Sentence& s) {
  const std::size_t len = s.text.size();
  auto check = [&](const Span& sp, const char* what) {
    if (sp.start >= sp.end || sp.end > len) {
      throw DataError("sentence '" + s.sent_id + "': invalid " + what + " span [" +
                      std::to_string(sp.start) + ", " + std::to_string(sp.end) + ") for text of length " +
                      std::to_string(len));
    }
  };
  if (!s.gold_events) return;
  for (const auto& ev : *s.gold_events) {
    check(ev.trigger, "trigger");
    if (ev.type.empty()) throw DataError("sentence '" + s.sent_id + "': empty event type");
    for (const auto& arg : ev.arguments) {
      check(arg.span, "argument");
      if (arg.role.empty()) throw DataError("sentence '" + s.sent_id + "': empty role label");
    }
  }
}

Document parse_document(std::string_view json_line, std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(where + "malformed JSON (" + e.what() + ")");
  }
  Document doc;
  try {
    doc.doc_id = j.at("doc_id").get<std::string>();
    if (doc.doc_id.empty()) throw DataError(where + "empty doc_id");
    for (const auto& js : j.value("sentences", nlohmann::json::array())) {
      Sentence s;
      s.sent_id = js.at("sent_id").get<std::string>();
      s.text = js.at("text").get<std::string>();
      s.tokens = tokenize(s.text);
      if (js.contains("gold_events") && !js["gold_events"].is_null()) {
        std::vector<GoldEvent> events;
        for (const auto& je : js["gold_events"]) {
          GoldEvent ev;
          try {
            ev.trigger = read_span(je.at("trigger"));
            ev.type = je.at("type").get<std::string>();
            for (const auto& ja : je.value("args", nlohmann::json::array())) {
              if (!ja.is_array() || ja.size() != 2) throw DataError("argument must be [[start, end], role]");
              ev.arguments.push_back({read_span(ja[0]), ja[1].get<std::string>()});
            }
          } catch (const DataError& e) {
            throw DataError(where + "sentence '" + s.sent_id + "': " + e.what());
          }
          events.push_back(std::move(ev));
        }
        s.gold_events = std::move(events);
      }
      try {
        validate_sentence(s);
      } catch (const DataError& e) {
        throw DataError(where + e.what());
      }
      doc.sentences.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + "schema error (" + e.what() + ")");
  }
  return doc;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    Document doc = parse_document(line, line_no);
    if (!seen.insert(doc.doc_id).second) {
      throw DataError("line " + std::to_string(line_no) + ": duplicate doc_id '" + doc.doc_id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

// ---------------------------------------------------------------------------

Lexicon::Lexicon(std::unordered_set<std::string> verbs, std::unordered_set<std::string> nouns,
                 const std::vector<std::string>& gazetteer) {
  for (const auto& v : verbs) verbs_.insert(to_lower(v));
  for (const auto& n : nouns) nouns_.insert(to_lower(n));
  for (const auto& entry : gazetteer) {
    auto toks = tokenize(entry);
    if (toks.empty()) continue;
    gazetteer_.insert(joined_key(toks, 0, toks.size()));
    max_entry_tokens_ = std::max(max_entry_tokens_, toks.size());
  }
}

Lexicon Lexicon::load(const std::filesystem::path& verbs, const std::filesystem::path& nouns,
                      const std::filesystem::path& gazetteer) {
  auto v = read_lines(verbs);
  auto n = read_lines(nouns);
  return Lexicon({v.begin(), v.end()}, {n.begin(), n.end()}, read_lines(gazetteer));
}

bool Lexicon::is_verb(std::string_view token) const { return verbs_.count(to_lower(token)) > 0; }
bool Lexicon::is_noun(std::string_view token) const { return nouns_.count(to_lower(token)) > 0; }

std::size_t Lexicon::gazetteer_match(const std::vector<Token>& tokens, std::size_t pos) const {
  const std::size_t avail = tokens.size() - std::min(pos, tokens.size());
  for (std::size_t len = std::min(max_entry_tokens_, avail); len > 0; --len) {
    if (gazetteer_.count(joined_key(tokens, pos, len))) return len;
  }
  return 0;
}

// ---------------------------------------------------------------------------

EmbeddingTable::EmbeddingTable(std::size_t dimension, std::uint64_t oov_seed)
    : dim_(dimension), oov_seed_(oov_seed) {
  if (dim_ == 0) throw DataError("embedding dimension must be positive");
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path, std::uint64_t oov_seed) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::optional<EmbeddingTable> table;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    std::vector<double> values;
    double v;
    while (ls >> v) values.push_back(v);
    if (!ls.eof()) throw DataError("embeddings line " + std::to_string(line_no) + ": non-numeric value");

    // "<count> <dim>" header.
    if (!table && values.size() == 1 && line_no == 1 &&
        token.find_first_not_of("0123456789") == std::string::npos) {
      table.emplace(static_cast<std::size_t>(values[0]), oov_seed);
      continue;
    }
    if (!table) table.emplace(values.size(), oov_seed);
    if (values.size() != table->dimension()) {
      throw DataError("embeddings line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table->dimension()) + " values, got " + std::to_string(values.size()));
    }
    table->insert(token, Eigen::Map<const Eigen::VectorXd>(values.data(), values.size()));
  }
  if (!table) throw DataError("embeddings file " + path.string() + " is empty");
  return std::move(*table);
}

void EmbeddingTable::insert(std::string token, Eigen::VectorXd vec) {
  if (static_cast<std::size_t>(vec.size()) != dim_) throw DataError("embedding for '" + token + "' has wrong length");
  entries_.insert_or_assign(std::move(token), std::move(vec));
}

bool EmbeddingTable::contains(std::string_view token) const {
  return entries_.count(std::string(token)) || entries_.count(to_lower(token));
}

Eigen::VectorXd EmbeddingTable::embed(std::string_view token) const {
  if (auto it = entries_.find(std::string(token)); it != entries_.end()) return it->second;
  if (auto it = entries_.find(to_lower(token)); it != entries_.end()) return it->second;
  return oov_vector(token);
}

Eigen::VectorXd EmbeddingTable::oov_vector(std::string_view token) const {
  // mt19937_64 output is fully specified, and the normal draws use an explicit
  // Box-Muller transform, so the vector is identical on every platform.
  std::mt19937_64 rng(splitmix64(oov_seed_ ^ splitmix64(fnv1a(to_lower(token)))));
  auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  Eigen::VectorXd v(dim_);
  for (std::size_t i = 0; i < dim_; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    v[i] = r * std::cos(theta);
    if (i + 1 < dim_) v[i + 1] = r * std::sin(theta);
  }
  return v / v.norm();
}

Eigen::VectorXd EmbeddingTable::embed_phrase(std::string_view phrase) const {
  auto toks = tokenize(phrase);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim_);
  if (toks.empty()) return sum;
  for (const auto& t : toks) sum += embed(t.text);
  return sum / static_cast<double>(toks.size());
}

}  // namespace pglee
