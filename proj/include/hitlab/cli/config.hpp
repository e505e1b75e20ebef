#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hitlab::cli {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class Kind { barrier, gasket, fbm_tip, curve };

inline constexpr std::array<std::string_view, 4> kKindNames{"barrier", "gasket", "fbm-tip", "curve"};

std::string_view to_string(Kind k);
std::optional<Kind> parse_kind(std::string_view name);

struct BarrierParams {
  double c = 1.0;
  double sigma = 1.0;
  double horizon = 10.0;
  double step = 1e-3;
  std::size_t hit_replicates = 10000;
  /// B paths simulated against one fixed W for the tau profile.
  std::size_t profile_replicates = 10000;
  /// Paths per class for the LIL discrimination; 0 skips it.
  std::size_t lil_paths = 200;
  double lil_largest_scale = 1e-2;
  double lil_smallest_scale = 1e-6;

  bool operator==(const BarrierParams&) const = default;
};

struct GasketParams {
  int n_max = 6;
  bool bottom_side = true;
  bool all_boundary = true;
  std::size_t random_subsets = 2;
  /// "cg" or "lu".
  std::string solver = "cg";
  /// Generation drawn in the harmonic-measure heat map.
  int heat_map_generation = 5;
  /// Monte Carlo walks checked against the exact bottom-side law of the
  /// heat-map generation; 0 skips the check.
  std::size_t mc_walks = 0;

  bool operator==(const GasketParams&) const = default;
};

struct FbmTipParams {
  std::vector<double> hurst{0.5};
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05, 0.025};
  double horizon = 50.0;
  std::size_t steps = std::size_t{1} << 16;
  std::size_t replicates = 10000;
  /// Epsilon used to compare the roughest and smoothest runs.
  double compare_epsilon = 0.1;

  bool operator==(const FbmTipParams&) const = default;
};

struct CurveParams {
  /// "brownian" or "file".
  std::string curve = "brownian";
  std::string curve_file;
  std::size_t brownian_steps = 100000;
  double brownian_horizon = 4.0;
  /// "disk" or "file".
  std::string domain = "disk";
  std::string domain_file;
  std::size_t disk_sides = 256;
  double radius = 1.0;
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> root{0.3, 0.2};
  std::size_t angle_samples = 10000;
  int d_max = 12;

  bool operator==(const CurveParams&) const = default;
};

struct ExperimentConfig {
  Kind kind = Kind::gasket;
  std::uint64_t seed = 1;
  /// Worker threads; 0 means all hardware threads.
  unsigned parallelism = 1;
  std::string output = "out";
  bool plots = true;
  BarrierParams barrier;
  GasketParams gasket;
  FbmTipParams fbm_tip;
  CurveParams curve;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Full serialization: every field, defaults included. Only the block of
/// the selected kind is written.
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

struct ParseOutcome {
  std::optional<ExperimentConfig> config;
  /// Every problem found, one message per entry, each naming its field.
  std::vector<std::string> errors;

  [[nodiscard]] bool ok() const { return errors.empty(); }
};

ParseOutcome parse_config(std::string_view text);
ParseOutcome from_json(const nlohmann::json& doc);
ParseOutcome load_config(const std::string& path);

}  // namespace hitlab::cli
