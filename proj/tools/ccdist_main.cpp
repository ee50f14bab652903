#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ccdist/errors.hpp"
#include "ccdist/experiment.hpp"
#include "ccdist/parallel.hpp"
#include "ccdist/scenarios.hpp"

namespace {

constexpr int kConfigError = 2;

int run(const std::string& path, const ccdist::RunOptions& options) {
  ccdist::ExperimentConfig config;
  try {
    config = ccdist::load_config(path);
  } catch (const ccdist::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  const ccdist::Manifest m = ccdist::run_experiment(config, options);
  std::cout << m.summary_json << "\n";
  if (!m.error.empty()) std::cerr << "compute error: " << m.error << "\n";
  if (m.assertion_failed) std::cerr << (options.assert_mode ? "assertion failed\n" : "expectation not met\n");
  std::cerr << "wrote " << (m.directory / "manifest.json").string() << " (" << m.files.size()
            << " files, " << m.wall_seconds << " s)\n";
  return m.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ccdist: Carnot-Caratheodory distance experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool assert_mode = false;

  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  auto* out_opt = run_cmd->add_option("--out", out_dir, "Output directory (overrides the config)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Seed (overrides the config)");
  run_cmd->add_option("--threads", threads, "Worker threads (default: CCDIST_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_flag("--assert", assert_mode, "Exit with 4 when an expect_* threshold fails");

  auto* validate_cmd = app.add_subcommand("validate", "Check a config without running it");
  validate_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  app.add_subcommand("scenarios", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (app.got_subcommand("scenarios")) {
    for (const auto& s : ccdist::scenario_catalog()) {
      std::cout << s.name << "\n  " << s.description << "\n  keys:";
      for (const auto& k : s.keys) std::cout << " " << k;
      std::cout << "\n";
    }
    return 0;
  }

  if (app.got_subcommand("validate")) {
    try {
      const auto c = ccdist::load_config(config_path);
      std::cout << "ok: " << c.scenario.name << " / " << ccdist::to_string(c.operation) << "\n";
      return 0;
    } catch (const ccdist::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kConfigError;
    }
  }

  ccdist::RunOptions options;
  if (*out_opt) options.out_dir = out_dir;
  if (*seed_opt) options.seed = seed;
  options.threads = threads;
  options.assert_mode = assert_mode;
  if (threads > 0) ccdist::set_default_thread_count(threads);
  try {
    return run(config_path, options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
