#include "pglee/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include "pglee/error.hpp"
#include "pglee/promptgen.hpp"

namespace pglee {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj[key].is_null()) return fallback;
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    if (!obj[key].is_number_unsigned() && !(obj[key].is_number_integer() && obj[key].get<long long>() >= 0)) {
      throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
    }
  }
  try {
    return obj[key].get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::optional<std::size_t> k_choice(const json& obj, const char* key, std::optional<std::size_t> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj[key];
  if (v.is_string() && v.get<std::string>() == "sweep") return std::nullopt;
  if (v.is_number_integer() && v.get<long long>() >= 1) return v.get<std::size_t>();
  throw ConfigError(std::string("clustering.") + key + " must be a positive integer or \"sweep\"");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string("config is missing paths.") + what);
  if (!fs::exists(p)) throw ConfigError(std::string("paths.") + what + " does not exist: " + p.string());
}

json span_json(const std::optional<Span>& s) { return s ? json::array({s->start, s->end}) : json(nullptr); }

std::optional<Span> span_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Span{j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

int report(std::ostream& log, const std::exception& e, int code) {
  log << "error: " << e.what() << '\n';
  return code;
}

template <typename F>
int guarded(std::ostream& log, F&& body) {
  try {
    body();
    return 0;
  } catch (const Error& e) {
    return report(log, e, e.exit_code());
  } catch (const json::exception& e) {
    return report(log, e, 3);
  } catch (const std::invalid_argument& e) {
    return report(log, e, 3);
  } catch (const std::out_of_range& e) {
    return report(log, e, 3);
  }
}

std::vector<Document> load_documents(const PipelineConfig& c) {
  require_file(c.paths.corpus, "corpus");
  return load_corpus(c.paths.corpus);
}

Lexicon load_lexicon(const PipelineConfig& c) {
  require_file(c.paths.verbs, "verbs");
  require_file(c.paths.nouns, "nouns");
  require_file(c.paths.gazetteer, "gazetteer");
  return Lexicon::load(c.paths.verbs, c.paths.nouns, c.paths.gazetteer);
}

EmbeddingTable load_table(const PipelineConfig& c) {
  require_file(c.paths.embeddings, "embeddings");
  return EmbeddingTable::load(c.paths.embeddings, c.oov_seed);
}

std::vector<DocumentCandidates> obtain_candidates(const PipelineConfig& c, std::ostream& log) {
  if (c.paths.candidates) {
    require_file(*c.paths.candidates, "candidates");
    return candidates_from_jsonl(*c.paths.candidates);
  }
  return extract_candidates(load_documents(c), load_lexicon(c), c.backend, log);
}

std::size_t count_role(const std::vector<EventGraph>& graphs, Role role) {
  std::size_t n = 0;
  for (const auto& g : graphs) {
    for (const auto& node : g.nodes()) n += node.role == role ? 1 : 0;
  }
  return n;
}

void write_manifest(const PipelineConfig& c, const std::string& command, const std::vector<std::string>& artifacts,
                    const json& extra = json::object()) {
  json m = {{"command", command}, {"seed", c.seed}, {"config", c.to_json()}, {"artifacts", artifacts}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  write_atomic(c.paths.output_dir / "manifest.json", m.dump(2) + "\n");
}

std::string predictions_to_jsonl(const std::vector<SentencePrediction>& preds, const InduceResult& r,
                                 const SchemaConfig& schema) {
  std::string out;
  for (const auto& p : preds) {
    json events = json::array();
    for (const auto& e : p.events) {
      json args = json::array();
      for (const auto& a : e.arguments) {
        args.push_back({{"span", {a.span.start, a.span.end}}, {"cluster", a.role_cluster},
                        {"role", schema.role_label(a.role_cluster)}});
      }
      events.push_back({{"trigger", {e.trigger.start, e.trigger.end}},
                        {"cluster", e.type_cluster},
                        {"type", e.type_cluster < r.trigger_names.labels.size() ? r.trigger_names.labels[e.type_cluster]
                                                                                : kUnmappedLabel},
                        {"arguments", args}});
    }
    out += json{{"sent_id", p.sent_id}, {"events", events}}.dump() + "\n";
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig c;
  const json empty = json::object();
  const json& paths = j.contains("paths") ? j["paths"] : empty;
  auto path_of = [&](const char* key) {
    const auto s = get_or<std::string>(paths, key, "");
    return s.empty() ? fs::path() : resolve(base_dir, s);
  };
  c.paths.corpus = path_of("corpus");
  c.paths.embeddings = path_of("embeddings");
  c.paths.verbs = path_of("verbs");
  c.paths.nouns = path_of("nouns");
  c.paths.gazetteer = path_of("gazetteer");
  if (auto out = path_of("output_dir"); !out.empty()) c.paths.output_dir = out;
  if (auto cand = path_of("candidates"); !cand.empty()) c.paths.candidates = cand;

  const json& be = j.contains("backend") ? j["backend"] : empty;
  const auto kind = get_or<std::string>(be, "kind", "rule");
  if (kind == "rule") {
    c.backend.kind = BackendConfig::Kind::Rule;
  } else if (kind == "external") {
    c.backend.kind = BackendConfig::Kind::External;
  } else {
    throw ConfigError("backend.kind must be \"rule\" or \"external\"");
  }
  c.backend.url = get_or<std::string>(be, "url", "");
  c.backend.timeout = std::chrono::milliseconds(get_or<long long>(be, "timeout_ms", 5000));
  c.backend.fallback = get_or<bool>(be, "fallback", true);
  c.backend.soft_tokens = get_or<int>(be, "soft_tokens", kDefaultSoftTokens);
  if (c.backend.kind == BackendConfig::Kind::External && c.backend.url.empty()) {
    throw ConfigError("backend.url is required for the external backend");
  }
  if (c.backend.timeout.count() <= 0 || c.backend.soft_tokens < 0) throw ConfigError("invalid backend timeout/soft_tokens");

  const json& enc = j.contains("encoder") ? j["encoder"] : empty;
  c.encoder.heads = get_or<std::size_t>(enc, "heads", 4);
  if (enc.contains("out_dim") && !enc["out_dim"].is_null()) c.encoder.out_dim = get_or<std::size_t>(enc, "out_dim", 0);
  c.encoder.leaky_slope = get_or<double>(enc, "leaky_slope", 0.2);
  const auto act = get_or<std::string>(enc, "activation", "elu");
  if (act == "elu") {
    c.encoder.activation = Activation::ELU;
  } else if (act == "leaky_relu") {
    c.encoder.activation = Activation::LeakyReLU;
  } else {
    throw ConfigError("encoder.activation must be \"elu\" or \"leaky_relu\"");
  }
  if (c.encoder.heads == 0 || (c.encoder.out_dim && *c.encoder.out_dim == 0)) throw ConfigError("encoder sizes must be positive");
  if (!(c.encoder.leaky_slope > 0.0 && c.encoder.leaky_slope < 1.0)) throw ConfigError("encoder.leaky_slope must lie in (0, 1)");

  const json& tr = j.contains("train") ? j["train"] : empty;
  c.train.epochs = get_or<std::size_t>(tr, "epochs", 30);
  c.train.learning_rate = get_or<double>(tr, "learning_rate", 1e-3);
  c.train.weight_decay = get_or<double>(tr, "weight_decay", 1e-4);
  c.train.batch_size = get_or<std::size_t>(tr, "batch_size", 16);
  c.train.edge_loss_weight = get_or<double>(tr, "edge_loss_weight", 0.5);
  if (c.train.epochs == 0 || c.train.batch_size == 0) throw ConfigError("train.epochs and train.batch_size must be >= 1");
  if (c.train.learning_rate < 0.0 || c.train.weight_decay < 0.0 || c.train.edge_loss_weight < 0.0) {
    throw ConfigError("train rates and weights must be non-negative");
  }

  const json& cl = j.contains("clustering") ? j["clustering"] : empty;
  c.clustering.k_trig = k_choice(cl, "k_trig", 38);
  c.clustering.k_arg = k_choice(cl, "k_arg", 24);
  c.clustering.sweep_min = get_or<std::size_t>(cl, "sweep_min", 2);
  c.clustering.sweep_max = get_or<std::size_t>(cl, "sweep_max", 50);
  c.clustering.sweep_iterations = get_or<std::size_t>(cl, "sweep_iterations", 50);
  c.clustering.iterations = get_or<std::size_t>(cl, "iterations", 10);
  c.clustering.batch = get_or<std::size_t>(cl, "batch", 256);
  const auto feat = get_or<std::string>(cl, "features", "encoded+input");
  if (feat == "encoded") {
    c.clustering.features = FeatureMode::Encoded;
  } else if (feat == "encoded+input") {
    c.clustering.features = FeatureMode::EncodedWithInput;
  } else {
    throw ConfigError("clustering.features must be \"encoded\" or \"encoded+input\"");
  }
  if (c.clustering.iterations == 0 || c.clustering.batch == 0 || c.clustering.sweep_iterations == 0) {
    throw ConfigError("clustering iterations and batch must be >= 1");
  }

  const json& sc = j.contains("schema") ? j["schema"] : empty;
  c.schema.theta = get_or<double>(sc, "theta", 0.3);
  if (sc.contains("argument_names")) {
    for (const auto& [k, v] : sc["argument_names"].items()) {
      try {
        c.schema.argument_name_map[std::stoul(k)] = v.get<std::string>();
      } catch (const std::exception&) {
        throw ConfigError("schema.argument_names keys must be cluster indices and values strings");
      }
    }
  }
  if (!(c.schema.theta > 0.0 && c.schema.theta < 1.0)) throw ConfigError("schema.theta must lie in (0, 1)");

  const auto scope = get_or<std::string>(j, "graph_scope", "sentence");
  if (scope == "sentence") {
    c.scope = GraphScope::Sentence;
  } else if (scope == "document") {
    c.scope = GraphScope::Document;
  } else {
    throw ConfigError("graph_scope must be \"sentence\" or \"document\"");
  }
  c.seed = get_or<std::uint64_t>(j, "seed", 42);
  c.oov_seed = get_or<std::uint64_t>(j, "oov_seed", 7);
  c.train.seed = c.seed;
  return c;
}

json PipelineConfig::to_json() const {
  auto k_json = [](const std::optional<std::size_t>& k) { return k ? json(*k) : json("sweep"); };
  json paths_j = {{"corpus", paths.corpus.string()},       {"embeddings", paths.embeddings.string()},
                  {"verbs", paths.verbs.string()},         {"nouns", paths.nouns.string()},
                  {"gazetteer", paths.gazetteer.string()}, {"output_dir", paths.output_dir.string()}};
  if (paths.candidates) paths_j["candidates"] = paths.candidates->string();
  json names = json::object();
  for (const auto& [k, v] : schema.argument_name_map) names[std::to_string(k)] = v;
  return {
      {"paths", paths_j},
      {"backend",
       {{"kind", backend.kind == BackendConfig::Kind::Rule ? "rule" : "external"},
        {"url", backend.url},
        {"timeout_ms", backend.timeout.count()},
        {"fallback", backend.fallback},
        {"soft_tokens", backend.soft_tokens}}},
      {"encoder",
       {{"heads", encoder.heads},
        {"out_dim", encoder.out_dim ? json(*encoder.out_dim) : json(nullptr)},
        {"leaky_slope", encoder.leaky_slope},
        {"activation", encoder.activation == Activation::ELU ? "elu" : "leaky_relu"}}},
      {"train",
       {{"epochs", train.epochs},
        {"learning_rate", train.learning_rate},
        {"weight_decay", train.weight_decay},
        {"batch_size", train.batch_size},
        {"edge_loss_weight", train.edge_loss_weight}}},
      {"clustering",
       {{"k_trig", k_json(clustering.k_trig)},
        {"k_arg", k_json(clustering.k_arg)},
        {"sweep_min", clustering.sweep_min},
        {"sweep_max", clustering.sweep_max},
        {"sweep_iterations", clustering.sweep_iterations},
        {"iterations", clustering.iterations},
        {"batch", clustering.batch},
        {"features", clustering.features == FeatureMode::Encoded ? "encoded" : "encoded+input"}}},
      {"schema", {{"theta", schema.theta}, {"argument_names", names}}},
      {"graph_scope", scope == GraphScope::Sentence ? "sentence" : "document"},
      {"seed", seed},
      {"oov_seed", oov_seed},
  };
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw ConfigError("empty key segment in override: " + assignment);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    if (!(*node).contains(part) || !(*node)[part].is_object()) (*node)[part] = json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

PipelineConfig load_config(const fs::path& path, const std::vector<std::string>& overrides) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  for (const auto& o : overrides) apply_override(j, o);
  return PipelineConfig::from_json(j, fs::absolute(path).parent_path());
}

PipelineInputs PipelineInputs::load(const PipelineConfig& config) {
  return {load_documents(config), load_lexicon(config), load_table(config)};
}

// ---------------------------------------------------------------------------

std::vector<DocumentCandidates> extract_candidates(const std::vector<Document>& documents, const Lexicon& lexicon,
                                                   const BackendConfig& backend, std::ostream& log) {
  bool use_external = backend.kind == BackendConfig::Kind::External;
  std::vector<DocumentCandidates> out;
  for (const auto& doc : documents) {
    DocumentCandidates dc{doc.doc_id, {}};
    for (const auto& s : doc.sentences) {
      SentenceCandidates sc{s.sent_id, {}};
      if (use_external) {
        try {
          PromptInstance prompt = build_prompt(s, lexicon);
          prompt.soft_token_count = backend.soft_tokens;
          ParseResult parsed = parse_candidates(generate_external(prompt, backend.url, backend.timeout), s);
          for (const auto& frag : parsed.diagnostics.skipped) {
            log << "warning: " << s.sent_id << ": skipped unparseable fragment '" << frag << "'\n";
          }
          sc.events = std::move(parsed.events);
        } catch (const BackendError& e) {
          if (!backend.fallback) throw;
          log << "warning: generation backend failed (" << e.what() << "); falling back to the rule backend\n";
          use_external = false;
        }
      }
      if (!use_external) sc.events = generate_rule_based(s, lexicon);
      dc.sentences.push_back(std::move(sc));
    }
    out.push_back(std::move(dc));
  }
  return out;
}

std::string candidates_to_jsonl(const std::vector<DocumentCandidates>& candidates) {
  std::string out;
  for (const auto& d : candidates) {
    for (const auto& s : d.sentences) {
      json events = json::array();
      for (const auto& e : s.events) {
        json args = json::array();
        for (const auto& a : e.arguments) args.push_back({{"text", a.text}, {"span", span_json(a.span)}});
        events.push_back({{"trigger", e.trigger_text}, {"span", span_json(e.trigger_span)}, {"arguments", args}});
      }
      out += json{{"doc_id", d.doc_id}, {"sent_id", s.sent_id}, {"events", events}}.dump() + "\n";
    }
  }
  return out;
}

std::vector<DocumentCandidates> candidates_from_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open candidates " + path.string());
  std::vector<DocumentCandidates> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      const auto doc_id = j.at("doc_id").get<std::string>();
      if (out.empty() || out.back().doc_id != doc_id) out.push_back({doc_id, {}});
      SentenceCandidates sc{j.at("sent_id").get<std::string>(), {}};
      for (const auto& je : j.at("events")) {
        CandidateEvent e{je.at("trigger").get<std::string>(), span_from(je.value("span", json(nullptr))), {}};
        for (const auto& ja : je.value("arguments", json::array())) {
          e.arguments.push_back({ja.at("text").get<std::string>(), span_from(ja.value("span", json(nullptr)))});
        }
        sc.events.push_back(std::move(e));
      }
      out.back().sentences.push_back(std::move(sc));
    } catch (const json::exception& e) {
      throw DataError("candidates line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<EventGraph> build_graphs(const std::vector<DocumentCandidates>& candidates, const EmbeddingTable& table,
                                     GraphScope scope) {
  std::vector<EventGraph> graphs;
  for (const auto& d : candidates) {
    if (scope == GraphScope::Document) {
      EventGraph g = build_graph(d.sentences, table, d.doc_id);
      if (g.size() > 0) graphs.push_back(std::move(g));
      continue;
    }
    for (const auto& s : d.sentences) {
      EventGraph g = build_graph(std::vector<SentenceCandidates>{s}, table, s.sent_id);
      if (g.size() > 0) graphs.push_back(std::move(g));
    }
  }
  return graphs;
}

// ---------------------------------------------------------------------------

InduceResult run_induce(const PipelineConfig& config, const std::vector<DocumentCandidates>& candidates,
                        const EmbeddingTable& table, std::ostream& log) {
  InduceResult r;
  r.graphs = build_graphs(candidates, table, config.scope);
  const std::size_t n_trig = count_role(r.graphs, Role::Trigger);
  const std::size_t n_arg = count_role(r.graphs, Role::Argument);
  if (n_trig == 0) throw DataError("no candidate events to induce schemas from");

  const std::size_t d = table.dimension();
  EncoderParams params = EncoderParams::random(config.encoder.heads, d, config.encoder.out_dim.value_or(d),
                                               config.seed ^ 0x5eedf00dULL, config.encoder.leaky_slope,
                                               config.encoder.activation);

  const auto& cc = config.clustering;
  auto choose_k = [&](std::optional<std::size_t> fixed, std::size_t available, Role role,
                      std::optional<SweepResult>& sweep_out) -> std::size_t {
    if (available == 0) return 0;
    if (fixed) {
      if (*fixed > available) {
        log << "warning: k for " << role_name(role) << " clusters lowered from " << *fixed << " to " << available
            << " (number of " << role_name(role) << " nodes)\n";
        return available;
      }
      return *fixed;
    }
    const std::size_t hi = std::min(cc.sweep_max, available);
    if (cc.sweep_min < 2 || hi < cc.sweep_min) {
      throw ConfigError(std::string("sweep range [") + std::to_string(cc.sweep_min) + ", " + std::to_string(cc.sweep_max) +
                        "] is invalid for " + std::to_string(available) + " " + role_name(role) + " nodes");
    }
    for (auto& g : r.graphs) encode_graph(params, g);
    const auto pts = collect_features(r.graphs, role, cc.features);
    sweep_out = sweep_k(pts, cc.sweep_min, hi, config.seed, cc.sweep_iterations, cc.batch);
    return sweep_out->best_k;
  };
  const std::size_t k_trig = choose_k(cc.k_trig, n_trig, Role::Trigger, r.trigger_sweep);
  const std::size_t k_arg = choose_k(cc.k_arg, n_arg, Role::Argument, r.argument_sweep);

  TrainConfig tc = config.train;
  tc.seed = config.seed;
  r.trained = train(std::move(params), r.graphs, tc, ClusterSchedule{k_trig, k_arg, cc.iterations, cc.batch, cc.features});

  for (auto& g : r.graphs) r.attention.push_back(encode_graph(r.trained.params, g));
  r.node_clusters = node_clusters_from(r.graphs, r.trained.trigger_model.assignments, r.trained.argument_model.assignments);

  std::vector<std::string> texts;
  for (const auto& g : r.graphs) {
    for (const auto& n : g.nodes()) {
      if (n.role == Role::Trigger) texts.push_back(n.text);
    }
  }
  const auto trig_pts = collect_features(r.graphs, Role::Trigger, cc.features);
  r.trigger_names = name_trigger_clusters(r.trained.trigger_model, trig_pts, texts);
  for (const auto& w : r.trigger_names.warnings) log << "warning: " << w << '\n';
  r.schemas = induce_schemas(r.graphs, r.attention, r.node_clusters, k_trig, r.trigger_names.labels, config.schema);
  return r;
}

std::vector<SentencePrediction> predictions_from(const InduceResult& induced) {
  std::vector<SentencePrediction> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t g = 0; g < induced.graphs.size(); ++g) {
    const EventGraph& graph = induced.graphs[g];
    for (std::size_t i = 0; i < graph.size(); ++i) {
      const Node& n = graph.node(i);
      if (n.role != Role::Trigger || !n.span) continue;
      PredictedEvent ev{*n.span, induced.node_clusters[g][i], {}};
      for (std::size_t j : graph.neighbors(i)) {
        const Node& a = graph.node(j);
        if (a.role == Role::Argument && a.span) ev.arguments.push_back({*a.span, induced.node_clusters[g][j]});
      }
      auto [it, fresh] = index.emplace(n.source, out.size());
      if (fresh) out.push_back({n.source, {}});
      out[it->second].events.push_back(std::move(ev));
    }
  }
  return out;
}

void write_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw DataError("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------

int cmd_extract(const PipelineConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const auto docs = load_documents(config);
    const auto lexicon = load_lexicon(config);
    const auto candidates = extract_candidates(docs, lexicon, config.backend, log);
    write_atomic(config.paths.output_dir / "candidates.jsonl", candidates_to_jsonl(candidates));
    write_manifest(config, "extract", {"candidates.jsonl"});
  });
}

int cmd_induce(const PipelineConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const auto candidates = obtain_candidates(config, log);
    const auto table = load_table(config);
    const InduceResult r = run_induce(config, candidates, table, log);
    const fs::path& out = config.paths.output_dir;
    std::vector<std::string> artifacts;
    auto emit = [&](const std::string& name, const std::string& body) {
      write_atomic(out / name, body);
      artifacts.push_back(name);
    };
    if (!config.paths.candidates) emit("candidates.jsonl", candidates_to_jsonl(candidates));
    emit("encoder.json", encoder_to_json(r.trained.params) + "\n");
    emit("clusters_trigger.json", cluster_model_to_json(r.trained.trigger_model) + "\n");
    emit("clusters_argument.json", cluster_model_to_json(r.trained.argument_model) + "\n");
    emit("schemas.json", schemas_to_json(r.schemas) + "\n");
    emit("predictions.jsonl", predictions_to_jsonl(predictions_from(r), r, config.schema));
    if (r.trigger_sweep || r.argument_sweep) {
      json sw = json::object();
      if (r.trigger_sweep) sw["trigger"] = json::parse(sweep_to_json(*r.trigger_sweep));
      if (r.argument_sweep) sw["argument"] = json::parse(sweep_to_json(*r.argument_sweep));
      emit("sweep.json", sw.dump(2) + "\n");
    }
    write_manifest(config, "induce", artifacts, {{"epoch_loss", r.trained.epoch_loss}});
  });
}

int cmd_sweep(const PipelineConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const auto& cc = config.clustering;
    if (cc.sweep_min < 2 || cc.sweep_max < cc.sweep_min) {
      throw ConfigError("sweep range [" + std::to_string(cc.sweep_min) + ", " + std::to_string(cc.sweep_max) +
                        "] is invalid (need 2 <= sweep_min <= sweep_max)");
    }
    const auto candidates = obtain_candidates(config, log);
    const auto table = load_table(config);
    const InduceResult r = run_induce(config, candidates, table, log);
    json report = json::object();
    for (Role role : {Role::Trigger, Role::Argument}) {
      const auto pts = collect_features(r.graphs, role, cc.features);
      const std::size_t hi = std::min(cc.sweep_max, pts.size());
      if (hi < cc.sweep_min) {
        throw ConfigError(std::string("sweep range needs at least ") + std::to_string(cc.sweep_min) + " " +
                          role_name(role) + " nodes, found " + std::to_string(pts.size()));
      }
      if (hi < cc.sweep_max) log << "warning: " << role_name(role) << " sweep capped at k = " << hi << '\n';
      const SweepResult s = sweep_k(pts, cc.sweep_min, hi, config.seed, cc.sweep_iterations, cc.batch);
      report[role_name(role)] = json::parse(sweep_to_json(s));
      log << role_name(role) << " best_k = " << s.best_k << '\n';
    }
    write_atomic(config.paths.output_dir / "sweep.json", report.dump(2) + "\n");
    write_manifest(config, "sweep", {"sweep.json"});
  });
}

int cmd_eval(const PipelineConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const auto docs = load_documents(config);
    std::vector<SentenceGold> gold;
    std::set<std::string> types;
    std::set<std::string> roles;
    std::map<std::string, const Sentence*> sentences;
    for (const auto& d : docs) {
      for (const auto& s : d.sentences) {
        sentences[s.sent_id] = &s;
        if (!s.gold_events) continue;
        gold.push_back({s.sent_id, *s.gold_events});
        for (const auto& e : *s.gold_events) {
          types.insert(e.type);
          for (const auto& a : e.arguments) roles.insert(a.role);
        }
      }
    }
    if (types.empty()) throw DataError("corpus has no gold events; eval needs annotations");

    // Supervised mode: one cluster per gold label.
    PipelineConfig supervised = config;
    supervised.clustering.k_trig = types.size();
    supervised.clustering.k_arg = std::max<std::size_t>(roles.size(), 1);

    std::vector<DocumentCandidates> candidates;
    if (config.paths.candidates) {
      candidates = candidates_from_jsonl(*config.paths.candidates);
    } else {
      candidates = extract_candidates(docs, load_lexicon(config), config.backend, log);
    }
    const auto table = load_table(config);
    const InduceResult r = run_induce(supervised, candidates, table, log);

    // Gold label of every node, for the contingency matrices.
    std::vector<std::size_t> trig_assign, arg_assign;
    std::vector<std::optional<std::string>> trig_gold, arg_gold;
    for (std::size_t g = 0; g < r.graphs.size(); ++g) {
      for (std::size_t i = 0; i < r.graphs[g].size(); ++i) {
        const Node& n = r.graphs[g].node(i);
        std::optional<std::string> label;
        auto it = sentences.find(n.source);
        if (n.span && it != sentences.end() && it->second->gold_events) {
          for (const auto& e : *it->second->gold_events) {
            if (n.role == Role::Trigger && e.trigger == *n.span) {
              label = e.type;
              break;
            }
            if (n.role == Role::Argument) {
              for (const auto& a : e.arguments) {
                if (a.span == *n.span) {
                  label = a.role;
                  break;
                }
              }
              if (label) break;
            }
          }
        }
        (n.role == Role::Trigger ? trig_assign : arg_assign).push_back(r.node_clusters[g][i]);
        (n.role == Role::Trigger ? trig_gold : arg_gold).push_back(label);
      }
    }
    LabelMapping mapping;
    mapping.event_types = map_clusters_to_gold(trig_assign, trig_gold, r.trained.trigger_model.k);
    mapping.roles = map_clusters_to_gold(arg_assign, arg_gold, r.trained.argument_model.k);
    const EvalReport report = evaluate(predictions_from(r), gold, mapping);

    json out = json::parse(report.to_json());
    out["mapping"] = {{"event_types", mapping.event_types}, {"roles", mapping.roles}};
    write_atomic(config.paths.output_dir / "eval.json", out.dump(2) + "\n");
    write_manifest(config, "eval", {"eval.json"});
    log << "Trig-I F1 " << report.trig_i.f1 << ", Trig-C F1 " << report.trig_c.f1 << ", Arg-I F1 " << report.arg_i.f1
        << ", Arg-C F1 " << report.arg_c.f1 << '\n';
  });
}

}  // namespace pglee
