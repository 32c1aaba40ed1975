#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pglee/clustering.hpp"
#include "pglee/corpus.hpp"
#include "pglee/encoder.hpp"
#include "pglee/eventgraph.hpp"
#include "pglee/promptgen.hpp"
#include "pglee/schema.hpp"

namespace pglee {

enum class GraphScope { Sentence, Document };

struct BackendConfig {
  enum class Kind { Rule, External };
  Kind kind = Kind::Rule;
  std::string url;
  std::chrono::milliseconds timeout{5000};
  bool fallback = true;
  int soft_tokens = kDefaultSoftTokens;
};

struct EncoderConfig {
  std::size_t heads = 4;
  std::optional<std::size_t> out_dim;  // defaults to the embedding dimension
  double leaky_slope = 0.2;
  Activation activation = Activation::ELU;
};

struct ClusteringConfig {
  std::optional<std::size_t> k_trig = 38;  // nullopt: choose by silhouette sweep
  std::optional<std::size_t> k_arg = 24;
  std::size_t sweep_min = 2;
  std::size_t sweep_max = 50;
  std::size_t sweep_iterations = 50;
  std::size_t iterations = 10;
  std::size_t batch = 256;
  FeatureMode features = FeatureMode::EncodedWithInput;
};

struct PipelinePaths {
  std::filesystem::path corpus;
  std::filesystem::path embeddings;
  std::filesystem::path verbs;
  std::filesystem::path nouns;
  std::filesystem::path gazetteer;
  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> candidates;  // precomputed extract output
};

struct PipelineConfig {
  PipelinePaths paths;
  BackendConfig backend;
  EncoderConfig encoder;
  TrainConfig train;
  ClusteringConfig clustering;
  SchemaConfig schema;
  GraphScope scope = GraphScope::Sentence;
  std::uint64_t seed = 42;
  std::uint64_t oov_seed = 7;

  /// Relative paths resolve against `base_dir`. Throws ConfigError.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  nlohmann::json to_json() const;
};

/// Reads a config file; `overrides` are "dotted.key=value" pairs applied to
/// the JSON before parsing (value parsed as JSON, else taken as a string).
PipelineConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
void apply_override(nlohmann::json& j, const std::string& assignment);

struct PipelineInputs {
  std::vector<Document> documents;
  Lexicon lexicon;
  EmbeddingTable table{1, 0};

  static PipelineInputs load(const PipelineConfig& config);
};

struct DocumentCandidates {
  std::string doc_id;
  std::vector<SentenceCandidates> sentences;
};

/// Runs the configured generation backend over every sentence. External
/// failures fall back to the rule backend (with a warning on `log`) when
/// allowed, otherwise the BackendError propagates.
std::vector<DocumentCandidates> extract_candidates(const std::vector<Document>& documents, const Lexicon& lexicon,
                                                   const BackendConfig& backend, std::ostream& log);

std::string candidates_to_jsonl(const std::vector<DocumentCandidates>& candidates);
std::vector<DocumentCandidates> candidates_from_jsonl(const std::filesystem::path& path);

std::vector<EventGraph> build_graphs(const std::vector<DocumentCandidates>& candidates, const EmbeddingTable& table,
                                     GraphScope scope);

struct InduceResult {
  std::vector<EventGraph> graphs;
  std::vector<AttentionRecord> attention;
  TrainResult trained;
  NodeClusters node_clusters;
  ClusterNames trigger_names;
  std::vector<EventSchema> schemas;
  std::optional<SweepResult> trigger_sweep;  // present when k was chosen by sweep
  std::optional<SweepResult> argument_sweep;
};

/// graph build -> train -> cluster -> name -> induce.
InduceResult run_induce(const PipelineConfig& config, const std::vector<DocumentCandidates>& candidates,
                        const EmbeddingTable& table, std::ostream& log);

/// Sentence-level predictions (cluster ids) for every trigger node with a span.
std::vector<SentencePrediction> predictions_from(const InduceResult& induced);

/// Writes `contents` to `path` through a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

// Subcommands. Each writes into config.paths.output_dir and returns the
// process exit code; errors are reported on `log`.
int cmd_extract(const PipelineConfig& config, std::ostream& log);
int cmd_induce(const PipelineConfig& config, std::ostream& log);
int cmd_sweep(const PipelineConfig& config, std::ostream& log);
int cmd_eval(const PipelineConfig& config, std::ostream& log);

}  // namespace pglee
