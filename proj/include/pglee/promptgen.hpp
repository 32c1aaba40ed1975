#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pglee/corpus.hpp"

namespace pglee {

inline constexpr int kDefaultSoftTokens = 20;

struct PromptInstance {
  std::string input_text;
  std::string prompt_text;
  int soft_token_count = kDefaultSoftTokens;
};

struct CandidateArgument {
  std::string text;
  std::optional<Span> span;

  friend bool operator==(const CandidateArgument&, const CandidateArgument&) = default;
};

struct CandidateEvent {
  std::string trigger_text;
  std::optional<Span> trigger_span;
  std::vector<CandidateArgument> arguments;

  friend bool operator==(const CandidateEvent&, const CandidateEvent&) = default;
};

/// Selects lexicon content words and maximal gazetteer phrases, in sentence
/// order. A sentence-final '.', '!' or '?' is kept as the prompt terminator.
PromptInstance build_prompt(const Sentence& sentence, const Lexicon& lexicon);

// Grammar of the generated target:
//   "Event <trigger> has arguments: <a1>, <a2>; Event <trigger> has arguments: none."
std::string serialize_candidates(const std::vector<CandidateEvent>& events);

struct ParseDiagnostics {
  std::vector<std::string> skipped;  // unparseable fragments, verbatim
  bool empty() const { return skipped.empty(); }
};

struct ParseResult {
  std::vector<CandidateEvent> events;
  ParseDiagnostics diagnostics;
};

/// Tolerant parser for the grammar above. Mentions are aligned to the earliest
/// unconsumed matching token run of `sentence`; unmatched mentions get no span.
ParseResult parse_candidates(std::string_view y_text, const Sentence& sentence);

/// Deterministic local backend: verbs-file hits are triggers, maximal gazetteer
/// matches are arguments, each attached to the nearest trigger (ties go to the
/// preceding trigger).
std::vector<CandidateEvent> generate_rule_based(const Sentence& sentence, const Lexicon& lexicon);

/// Token distance between a one-token trigger at `trigger_pos` and a token run
/// [first, last].
std::size_t token_distance(std::size_t trigger_pos, std::size_t first, std::size_t last);

/// Client for the generation service: POST {endpoint}/generate.
/// Throws BackendError with a distinct Kind per failure mode.
std::string generate_external(const PromptInstance& instance, std::string_view endpoint,
                              std::chrono::milliseconds timeout);

/// Request body of the generation wire protocol.
std::string generation_request_body(const PromptInstance& instance);

}  // namespace pglee
