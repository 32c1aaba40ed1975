#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace pglee {

/// Half-open character range [start, end) into a sentence's text (byte offsets).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
};

struct GoldArgument {
  Span span;
  std::string role;
};

struct GoldEvent {
  Span trigger;
  std::string type;
  std::vector<GoldArgument> arguments;
};

struct Sentence {
  std::string sent_id;
  std::string text;
  std::vector<Token> tokens;
  std::optional<std::vector<GoldEvent>> gold_events;
};

struct Document {
  std::string doc_id;
  std::vector<Sentence> sentences;
};

// Whitespace segmentation; leading and trailing ASCII punctuation of each
// whitespace chunk becomes one single-character token per mark.
std::vector<Token> tokenize(std::string_view text);

std::string to_lower(std::string_view s);

/// Reads the JSON-Lines corpus. Blank lines are ignored. Throws DataError
/// with the offending line number or sent_id.
std::vector<Document> load_corpus(const std::filesystem::path& path);

/// Parses a single corpus line; `line_no` is only used in error messages.
Document parse_document(std::string_view json_line, std::size_t line_no = 1);

/// Checks the span invariants of one sentence; throws DataError naming sent_id.
void validate_sentence(const Sentence& sentence);

class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::unordered_set<std::string> verbs, std::unordered_set<std::string> nouns,
          const std::vector<std::string>& gazetteer);

  static Lexicon load(const std::filesystem::path& verbs, const std::filesystem::path& nouns,
                      const std::filesystem::path& gazetteer);

  bool is_verb(std::string_view token) const;
  bool is_noun(std::string_view token) const;
  bool is_content_word(std::string_view token) const { return is_verb(token) || is_noun(token); }

  /// Length in tokens of the longest gazetteer entry starting at tokens[pos], or 0.
  std::size_t gazetteer_match(const std::vector<Token>& tokens, std::size_t pos) const;

  const std::unordered_set<std::string>& verbs() const { return verbs_; }
  const std::unordered_set<std::string>& nouns() const { return nouns_; }

 private:
  std::unordered_set<std::string> verbs_;
  std::unordered_set<std::string> nouns_;
  // Gazetteer entries keyed by their lowercase tokenization, joined by a single space.
  std::unordered_set<std::string> gazetteer_;
  std::size_t max_entry_tokens_ = 0;
};

class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t dimension, std::uint64_t oov_seed);

  /// Text format: optional "<count> <dim>" header, then "token v1 ... vd" per line.
  static EmbeddingTable load(const std::filesystem::path& path, std::uint64_t oov_seed);

  void insert(std::string token, Eigen::VectorXd vec);

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  std::uint64_t oov_seed() const { return oov_seed_; }
  bool contains(std::string_view token) const;

  /// Stored vector (exact match, then lowercase), else a unit vector derived
  /// from (oov_seed, lowercase(token)).
  Eigen::VectorXd embed(std::string_view token) const;

  /// Mean of the token embeddings of `phrase`; zero vector if it has no tokens.
  Eigen::VectorXd embed_phrase(std::string_view phrase) const;

 private:
  Eigen::VectorXd oov_vector(std::string_view token) const;

  std::size_t dim_;
  std::uint64_t oov_seed_;
  std::unordered_map<std::string, Eigen::VectorXd> entries_;
};

}  // namespace pglee
