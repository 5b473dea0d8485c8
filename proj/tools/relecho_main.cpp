// relecho: batch front end for the relativistic echo pipelines.
// Exit codes: 0 success, 2 validation failure, 3 numerical guard, 4 I/O.

#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>

#include "relecho/error.hpp"
#include "relecho/scenario.hpp"
#include "relecho/version.hpp"

namespace {

int exit_code_for(const relecho::Error& e) {
  switch (e.code()) {
    case relecho::ErrorCode::Validation:
      return 2;
    case relecho::ErrorCode::Io:
      return 4;
    default:
      return 3;
  }
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config,--config", args.config_path,
                  "scenario config file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--threads", args.threads, "worker threads (0 = default)");
  cmd->add_option("--seed", args.seed, "seed for randomized initial states")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_flag("--strict", args.strict, "treat warnings as errors");
}

relecho::RunOptions make_options(const CommonArgs& args) {
  relecho::RunOptions opts;
  opts.out_dir = args.out_dir;
  opts.threads = args.threads;
  opts.strict = args.strict;
  if (args.seed_set) opts.seed = args.seed;
  return opts;
}

int dispatch(const std::string& name, const CommonArgs& args) {
  using namespace relecho;
  if (args.config_path.empty()) {
    std::fprintf(stderr, "error: no config file given\n");
    return 2;
  }
  try {
    const Config cfg = Config::parse_file(args.config_path);
    const Scenario sc = Scenario::from_config(cfg);

    if (name == "validate") {
      const auto bad = sc.validate();
      if (!bad.empty()) {
        std::fprintf(stderr, "validation failed:\n");
        for (const auto& b : bad) std::fprintf(stderr, "  %s\n", b.c_str());
        return 2;
      }
      std::printf("ok: %s\n", args.config_path.c_str());
      return 0;
    }

    const RunOptions opts = make_options(args);
    RunOutcome outcome;
    if (name == "run")
      outcome = run_scenario(sc, cfg, opts);
    else if (name == "spectrum")
      outcome = run_spectrum(sc, cfg, opts);
    else if (name == "evolve")
      outcome = run_evolve(sc, cfg, opts);
    else if (name == "perturbative")
      outcome = run_perturbative(sc, cfg, opts);
    else if (name == "kg")
      outcome = run_kg(sc, cfg, opts);

    for (const auto& w : outcome.warnings)
      std::fprintf(stderr, "warning: %s\n", w.c_str());
    for (const auto& o : outcome.outputs) std::printf("wrote %s\n", o.c_str());
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", error_name(e.code()), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relativistic echo dynamics simulator"};
  app.set_version_flag("--version", relecho::version_string());
  app.require_subcommand(1);

  const char* names[] = {"run", "validate", "spectrum", "evolve",
                         "perturbative", "kg"};
  const char* descs[] = {
      "execute the full scenario pipeline",
      "parse and validate a config without running",
      "dump the truncated energy spectrum with degeneracies",
      "fidelity series via the requested methods",
      "degenerate coefficient, predicted decay and boost report",
      "the 1+1 dimensional Klein-Gordon toy pipeline"};

  CommonArgs args[6];
  for (int i = 0; i < 6; ++i) add_common(app.add_subcommand(names[i], descs[i]), args[i]);

  CLI11_PARSE(app, argc, argv);

  for (int i = 0; i < 6; ++i)
    if (app.get_subcommand(names[i])->parsed()) return dispatch(names[i], args[i]);
  return 2;
}
