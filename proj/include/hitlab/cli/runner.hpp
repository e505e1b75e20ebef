#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hitlab/cli/config.hpp"

namespace hitlab::cli {

enum class RunStatus { ok, insufficient_data, runtime_error };

const char* to_string(RunStatus s);

struct RunReport {
  ExperimentConfig config;
  double wall_clock_seconds = 0.0;
  /// Kind-specific metrics; depends only on the config, not on parallelism.
  nlohmann::ordered_json findings = nlohmann::ordered_json::object();
  /// Files written, relative to the output directory. The report itself is
  /// report.json and is not listed.
  std::vector<std::string> files;
  RunStatus status = RunStatus::ok;
  std::string error;

  /// 0 ok, 2 runtime error, 3 insufficient data.
  [[nodiscard]] int exit_code() const;
};

nlohmann::ordered_json to_json(const RunReport& report);

/// Runs the experiment, writes CSV data, SVG plots (if enabled) and
/// report.json into config.output. Exceptions become runtime_error reports.
RunReport run(const ExperimentConfig& config);

/// Re-renders every plot whose CSV sources exist in `dir` (restricted to the
/// file names in `sources` when given); returns the SVG file names written.
std::vector<std::string> render_plots(const std::filesystem::path& dir,
                                      std::span<const std::string> sources = {});

}  // namespace hitlab::cli
