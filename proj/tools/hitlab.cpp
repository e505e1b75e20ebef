// Command-line front end: run, validate, list-kinds, plot.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "hitlab/cli/config.hpp"
#include "hitlab/cli/runner.hpp"

using namespace hitlab::cli;

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

int print_errors(const std::string& path, const ParseOutcome& parsed) {
  std::cerr << path << ": " << parsed.errors.size() << " error(s)\n";
  for (const auto& e : parsed.errors) std::cerr << "  " << e << '\n';
  return kConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hitting-time experiments: barrier crossing, gasket walks, fBM tip, curve hitting"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> parallelism;
  std::string out_dir;

  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
  run_cmd->add_option("--config", config_path, "Config file (JSON)")->required();
  run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--parallelism", parallelism, "Override the worker count (0 = all cores)");
  run_cmd->add_option("--out", out_dir, "Override the output directory");

  auto* validate_cmd = app.add_subcommand("validate", "Check a config file without running it");
  validate_cmd->add_option("--config", config_path, "Config file (JSON)")->required();

  app.add_subcommand("list-kinds", "List the experiment kinds");

  auto* plot_cmd = app.add_subcommand("plot", "Re-render SVG plots from the CSV files of a run");
  plot_cmd->add_option("--out", out_dir, "Run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (app.got_subcommand("list-kinds")) {
    std::cout << "barrier   B against the moving barrier c + sigma W: hit probability, conditional tau profile, LIL test\n"
              << "gasket    simple random walk on Sierpinski gasket graphs: exact hitting laws and entropy scan\n"
              << "fbm-tip   planar fBM from (1, 0): probability of first hitting the negative axis within [-eps, 0]\n"
              << "curve     rerooted, rotated curve in a domain: boundary hitting measure and its entropy dimension\n";
    return 0;
  }

  if (app.got_subcommand("plot")) {
    try {
      const auto files = render_plots(out_dir);
      if (files.empty()) {
        std::cerr << "no plottable CSV files in " << out_dir << '\n';
        return kRuntimeError;
      }
      for (const auto& f : files) std::cout << (std::filesystem::path(out_dir) / f).string() << '\n';
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "plot: " << e.what() << '\n';
      return kRuntimeError;
    }
  }

  const ParseOutcome parsed = load_config(config_path);
  if (!parsed.ok()) return print_errors(config_path, parsed);

  if (app.got_subcommand("validate")) {
    std::cout << config_path << ": ok (kind " << to_string(parsed.config->kind) << ")\n";
    return 0;
  }

  ExperimentConfig cfg = *parsed.config;
  if (seed) cfg.seed = *seed;
  if (parallelism) cfg.parallelism = *parallelism;
  if (!out_dir.empty()) cfg.output = out_dir;

  const RunReport report = run(cfg);
  std::cout << to_json(report).dump(2) << '\n';
  if (report.status == RunStatus::runtime_error) std::cerr << "error: " << report.error << '\n';
  return report.exit_code();
}
