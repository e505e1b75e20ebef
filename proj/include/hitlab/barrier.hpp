#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "hitlab/paths.hpp"
#include "hitlab/rng.hpp"

namespace hitlab::barrier {

/// Parameters of the moving barrier c + sigma W seen by an independent BM B.
struct BarrierConfig {
  double c = 1.0;
  double sigma = 1.0;
  double horizon = 10.0;
  double step = 1e-3;

  /// Throws std::invalid_argument naming the offending field. `allow_zero_sigma`
  /// admits the degenerate constant barrier (conditional profile only).
  void validate(bool allow_zero_sigma = false) const;

  /// Level X must reach after rotating to X = (B - sigma W)/sqrt(1 + sigma^2).
  [[nodiscard]] double c_tilde() const;
  /// Weight of the BES(3) part in the time-reversed barrier, in (-1, 0].
  [[nodiscard]] double alpha() const;
  /// Midpoint of the BM and mixture LIL constants, (1 + sqrt(1 - alpha^2)) / 2.
  [[nodiscard]] double threshold() const;
  [[nodiscard]] TimeGrid grid() const;
};

struct CrossingResult {
  bool hit = false;
  double tau = std::numeric_limits<double>::quiet_NaN();
  std::size_t index = 0;
};

/// First grid step on which B - sigma W - c reaches 0; tau interpolates
/// linearly inside that step.
CrossingResult first_crossing(const Path& b, const Path& w, const BarrierConfig& cfg);

/// First crossing of a single path against a constant level.
CrossingResult first_crossing_level(const Path& x, double level);

/// (X, Y) = orthogonal rotation of (B, W) by the barrier angle.
std::pair<Path, Path> rotate_pair(const Path& b, const Path& w, double sigma);

/// Exact draw of the first-passage time of standard BM to level c_tilde,
/// c_tilde^2 / Z^2.
double sample_tau_exact(double c_tilde, const RngStream& rng);

/// P(tau <= t) = 2 Phi(-c_tilde / sqrt(t)).
double tau_cdf(double c_tilde, double t);

/// Simulates one (B, W) pair lazily on cfg.grid() and stops at the first
/// crossing. Produces the same result as sample_bm on rng.fork(0) / fork(1)
/// followed by first_crossing.
CrossingResult simulate_crossing(const BarrierConfig& cfg, const RngStream& rng);

struct HitEstimate {
  std::size_t hits = 0;
  std::size_t replicates = 0;
  double p = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of P(tau <= horizon).
HitEstimate estimate_hit_probability(const BarrierConfig& cfg, std::size_t replicates,
                                     const RngStream& rng, unsigned workers = 1);

// ------------------------------------------------------------------ LIL

struct LilStatistic {
  double value = 0.0;
  std::vector<double> scales;
};

/// Scales largest, largest/2, ... while >= smallest. Throws if
/// largest >= 1/e or smallest <= 0.
std::vector<double> lil_scales(double largest, double smallest);

/// max over scales s of path(s) / sqrt(2 s log log(1/s)).
///
/// Throws if any scale is >= 1/e, if the scales are not strictly decreasing,
/// or if the smallest scale is below 10 grid steps.
LilStatistic lil_statistic(const Path& path, std::span<const double> scales);

enum class PathLabel { bm_like, mixture_like };

const char* to_string(PathLabel label);

/// BM-like iff lil_statistic > cfg.threshold().
std::vector<PathLabel> discriminate(std::span<const Path> paths, const BarrierConfig& cfg,
                                    std::span<const double> scales);

// ------------------------------------------------- conditional tau profile

struct TauProfile {
  static constexpr int kMinDepth = 4;
  static constexpr int kMaxDepth = 12;

  std::size_t replicates = 0;
  std::size_t hits = 0;
  /// Counts per dyadic cell of [0, horizon] at kMaxDepth.
  std::vector<std::size_t> finest_counts;
  /// Base-2 entropy of the empirical tau law at depths kMinDepth..kMaxDepth.
  std::vector<double> entropy;
  /// Least-squares slope of entropy against depth over all reported depths.
  double slope = 0.0;
  /// Fewer than 100 hits; entropies are still reported.
  bool insufficient = false;

  [[nodiscard]] std::vector<std::size_t> counts_at_depth(int depth) const;
  /// Slope of entropy vs depth over [lo, hi].
  [[nodiscard]] double slope_between(int lo, int hi) const;
};

/// Holds W fixed and simulates `replicates` independent B paths against
/// c + sigma w, recording where the resulting tau values fall. sigma = 0 is
/// accepted here.
TauProfile conditional_tau_profile(const Path& w, const BarrierConfig& cfg,
                                   std::size_t replicates, const RngStream& rng,
                                   unsigned workers = 1);

}  // namespace hitlab::barrier
