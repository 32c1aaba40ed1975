#include "pglee/promptgen.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pglee/error.hpp"

namespace pglee {

namespace {

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && to_lower(a) == to_lower(b);
}

// One scanned unit of a sentence: a single token or a gazetteer phrase.
struct Mention {
  std::size_t first;
  std::size_t last;  // inclusive
};

Span token_run_span(const Sentence& s, std::size_t first, std::size_t last) {
  return Span{s.tokens[first].start, s.tokens[last].end};
}

std::string span_text(const Sentence& s, const Span& sp) { return s.text.substr(sp.start, sp.end - sp.start); }

// Aligns `text` to the earliest run of unconsumed tokens that matches it
// case-insensitively; marks the run consumed.
std::optional<Span> align(std::string_view text, const Sentence& s, std::vector<bool>& consumed) {
  const auto needle = tokenize(text);
  const std::size_t m = needle.size();
  if (m == 0 || m > s.tokens.size()) return std::nullopt;
  for (std::size_t i = 0; i + m <= s.tokens.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < m && ok; ++k) {
      ok = !consumed[i + k] && iequals(s.tokens[i + k].text, needle[k].text);
    }
    if (!ok) continue;
    for (std::size_t k = 0; k < m; ++k) consumed[i + k] = true;
    return token_run_span(s, i, i + m - 1);
  }
  return std::nullopt;
}

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string base_path;
};

UrlParts split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw BackendError(BackendError::Kind::Connection, "endpoint '" + std::string(url) + "' lacks a scheme");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  UrlParts parts;
  parts.origin = std::string(url.substr(0, path_start));
  if (path_start != std::string_view::npos) parts.base_path = std::string(url.substr(path_start));
  while (!parts.base_path.empty() && parts.base_path.back() == '/') parts.base_path.pop_back();
  return parts;
}

}  // namespace

PromptInstance build_prompt(const Sentence& sentence, const Lexicon& lexicon) {
  PromptInstance out;
  out.input_text = sentence.text;
  const auto& toks = sentence.tokens;
  std::vector<std::string> pieces;
  for (std::size_t i = 0; i < toks.size();) {
    if (std::size_t len = lexicon.gazetteer_match(toks, i); len > 0) {
      pieces.push_back(span_text(sentence, token_run_span(sentence, i, i + len - 1)));
      i += len;
      continue;
    }
    if (lexicon.is_content_word(toks[i].text)) pieces.push_back(toks[i].text);
    ++i;
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (i) out.prompt_text += ' ';
    out.prompt_text += pieces[i];
  }
  if (!pieces.empty() && !toks.empty()) {
    const std::string& last = toks.back().text;
    if (last == "." || last == "!" || last == "?") out.prompt_text += last;
  }
  return out;
}

std::string serialize_candidates(const std::vector<CandidateEvent>& events) {
  std::string out;
  for (std::size_t e = 0; e < events.size(); ++e) {
    if (e) out += "; ";
    out += "Event " + events[e].trigger_text + " has arguments: ";
    if (events[e].arguments.empty()) {
      out += "none";
      continue;
    }
    for (std::size_t a = 0; a < events[e].arguments.size(); ++a) {
      if (a) out += ", ";
      out += events[e].arguments[a].text;
    }
  }
  if (!out.empty()) out += '.';
  return out;
}

ParseResult parse_candidates(std::string_view y_text, const Sentence& sentence) {
  static const std::regex kEvent(R"(^event\s+(.+?)\s+has\s+arguments\s*:\s*(.*)$)",
                                 std::regex::ECMAScript | std::regex::icase);
  ParseResult result;
  std::vector<bool> consumed(sentence.tokens.size(), false);

  // Fragments separated by ';' or newline. A trailing '.' closes the final
  // fragment and each newline-terminated fragment.
  struct Fragment {
    std::string_view text;
    bool closes;
  };
  std::vector<Fragment> fragments;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= y_text.size(); ++i) {
    if (i == y_text.size() || y_text[i] == ';' || y_text[i] == '\n') {
      const bool closes = i == y_text.size() || y_text[i] == '\n';
      fragments.push_back({y_text.substr(start, i - start), closes});
      start = i + 1;
    }
  }
  for (std::size_t f = 0; f < fragments.size(); ++f) {
    std::string_view frag = trim(fragments[f].text);
    if (frag.empty()) continue;
    const bool last_nonempty = std::all_of(fragments.begin() + static_cast<std::ptrdiff_t>(f) + 1, fragments.end(),
                                           [](const Fragment& x) { return trim(x.text).empty(); });
    if ((fragments[f].closes || last_nonempty) && frag.back() == '.') frag = trim(frag.substr(0, frag.size() - 1));

    std::cmatch m;
    if (!std::regex_match(frag.data(), frag.data() + frag.size(), m, kEvent)) {
      result.diagnostics.skipped.emplace_back(frag);
      continue;
    }
    CandidateEvent ev;
    ev.trigger_text = std::string(trim(std::string_view(m[1].first, static_cast<std::size_t>(m[1].length()))));
    if (ev.trigger_text.empty()) {
      result.diagnostics.skipped.emplace_back(frag);
      continue;
    }
    ev.trigger_span = align(ev.trigger_text, sentence, consumed);

    const std::string_view rest = trim(std::string_view(m[2].first, static_cast<std::size_t>(m[2].length())));
    if (!rest.empty() && !iequals(rest, "none")) {
      std::size_t s = 0;
      for (std::size_t i = 0; i <= rest.size(); ++i) {
        if (i < rest.size() && rest[i] != ',') continue;
        const std::string_view piece = trim(rest.substr(s, i - s));
        s = i + 1;
        if (piece.empty()) continue;
        CandidateArgument arg{std::string(piece), std::nullopt};
        arg.span = align(arg.text, sentence, consumed);
        ev.arguments.push_back(std::move(arg));
      }
    }
    result.events.push_back(std::move(ev));
  }
  return result;
}

std::size_t token_distance(std::size_t trigger_pos, std::size_t first, std::size_t last) {
  if (trigger_pos < first) return first - trigger_pos;
  if (trigger_pos > last) return trigger_pos - last;
  return 0;
}

std::vector<CandidateEvent> generate_rule_based(const Sentence& sentence, const Lexicon& lexicon) {
  const auto& toks = sentence.tokens;
  std::vector<std::size_t> triggers;
  std::vector<Mention> entities;
  for (std::size_t i = 0; i < toks.size();) {
    if (std::size_t len = lexicon.gazetteer_match(toks, i); len > 0) {
      entities.push_back({i, i + len - 1});
      i += len;
      continue;
    }
    if (lexicon.is_verb(toks[i].text)) triggers.push_back(i);
    ++i;
  }

  std::vector<CandidateEvent> events;
  for (std::size_t t : triggers) {
    const Span sp = token_run_span(sentence, t, t);
    events.push_back({span_text(sentence, sp), sp, {}});
  }
  if (triggers.empty()) return events;

  for (const auto& ent : entities) {
    // triggers are sorted, so the first minimum found is the preceding one on ties.
    std::size_t best = 0;
    std::size_t best_dist = token_distance(triggers[0], ent.first, ent.last);
    for (std::size_t k = 1; k < triggers.size(); ++k) {
      const std::size_t d = token_distance(triggers[k], ent.first, ent.last);
      if (d < best_dist) {
        best = k;
        best_dist = d;
      }
    }
    const Span sp = token_run_span(sentence, ent.first, ent.last);
    events[best].arguments.push_back({span_text(sentence, sp), sp});
  }
  return events;
}

std::string generation_request_body(const PromptInstance& instance) {
  nlohmann::json body = {
      {"input", instance.input_text}, {"prompt", instance.prompt_text}, {"soft_tokens", instance.soft_token_count}};
  return body.dump();
}

std::string generate_external(const PromptInstance& instance, std::string_view endpoint,
                              std::chrono::milliseconds timeout) {
  using Kind = BackendError::Kind;
  const UrlParts url = split_url(endpoint);
  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(url.base_path + "/generate", generation_request_body(instance), "application/json");
  if (!res) {
    const auto err = res.error();
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           ((err == httplib::Error::Read || err == httplib::Error::Write) && elapsed >= timeout);
    if (timed_out) throw BackendError(Kind::Timeout, "generation request to " + std::string(endpoint) + " timed out");
    throw BackendError(Kind::Connection,
                       "generation request to " + std::string(endpoint) + " failed: " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    std::string detail;
    try {
      detail = nlohmann::json::parse(res->body).value("error", "");
    } catch (const nlohmann::json::exception&) {
    }
    throw BackendError(Kind::HttpStatus, "generation service returned HTTP " + std::to_string(res->status) +
                                             (detail.empty() ? "" : ": " + detail));
  }
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    throw BackendError(Kind::MalformedResponse, "generation service returned non-JSON body");
  }
  if (!body.is_object() || !body.contains("output") || !body["output"].is_string()) {
    throw BackendError(Kind::MissingOutput, "generation response has no string \"output\" field");
  }
  return body["output"].get<std::string>();
}

}  // namespace pglee
