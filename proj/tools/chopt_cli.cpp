#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chopt/chopt.h"

namespace {

int report(chopt_status s) {
  if (s != CHOPT_OK) std::fprintf(stderr, "chopt: %s\n", chopt_last_error());
  return chopt_status_exit_code(s);
}

int execute(const std::string& pipeline, const std::string& config, std::optional<std::uint64_t> seed,
            std::optional<std::string> out_dir, std::optional<int> threads) {
  chopt_session* session = nullptr;
  chopt_status s = chopt_session_create_from_file(config.c_str(), &session);
  if (s != CHOPT_OK) return report(s);
  if (!pipeline.empty()) s = chopt_session_set_pipeline(session, pipeline.c_str());
  if (s == CHOPT_OK && seed) s = chopt_session_set_seed(session, *seed);
  if (s == CHOPT_OK && out_dir) s = chopt_session_set_output_dir(session, out_dir->c_str());
  if (s == CHOPT_OK && threads) s = chopt_session_set_threads(session, *threads);
  if (s == CHOPT_OK) s = chopt_session_run(session);
  chopt_session_destroy(session);
  return report(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal control of a viscous Cahn-Hilliard tumour growth model with free treatment time"};
  app.set_version_flag("--version", std::string(chopt_version()));
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;

  struct Command {
    const char* name;
    const char* pipeline;  // empty: the one in the config
    const char* help;
  };
  const Command commands[] = {
      {"run", "", "Run the pipeline named in the config (default: all)"},
      {"simulate", "simulate", "Forward solve at the initial control"},
      {"optimize", "optimize", "Optimize control and treatment time"},
      {"verify", "verify", "Run the verification checks"},
  };
  std::string chosen;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the random seed");
    sub->add_option("--out-dir", out_dir, "Override the output directory");
    sub->add_option("--threads", threads, "Worker threads for verification probes")->check(CLI::PositiveNumber);
    sub->callback([&chosen, &c] { chosen = c.pipeline; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return execute(chosen, config, seed, out_dir, threads);
}
