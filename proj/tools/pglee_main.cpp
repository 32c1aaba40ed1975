#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pglee/error.hpp"
#include "pglee/pipeline.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Options& opts) {
  sub->add_option("--config", opts.config, "Pipeline config (JSON)")->required();
  sub->add_option("--seed", opts.seed, "Master seed; overrides the config");
  sub->add_option("--out", opts.out, "Output directory; overrides the config");
  sub->add_option("--set", opts.overrides, "Config override, dotted.key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pglee: event schema induction from prompt-generated candidates"};
  app.require_subcommand(1);
  Options opts;

  using Command = int (*)(const pglee::PipelineConfig&, std::ostream&);
  const std::vector<std::tuple<const char*, const char*, Command>> commands = {
      {"extract", "Generate candidate events for every corpus sentence", pglee::cmd_extract},
      {"induce", "Train the encoder, cluster nodes and write schemas", pglee::cmd_induce},
      {"sweep", "Silhouette sweep over k for both node roles", pglee::cmd_sweep},
      {"eval", "Supervised-mode scoring against gold annotations", pglee::cmd_eval},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, opts);
    subs.emplace_back(sub, fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  pglee::PipelineConfig config;
  try {
    std::vector<std::string> overrides = opts.overrides;
    if (opts.seed) overrides.push_back("seed=" + std::to_string(*opts.seed));
    config = pglee::load_config(opts.config, overrides);
    if (opts.out) config.paths.output_dir = *opts.out;
  } catch (const pglee::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  }

  for (const auto& [sub, fn] : subs) {
    if (sub->parsed()) return fn(config, std::cerr);
  }
  return 2;
}
