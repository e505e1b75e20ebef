#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hitlab/geometry.hpp"
#include "hitlab/rng.hpp"
#include "hitlab/stats.hpp"

namespace hitlab::fbm_tip {

/// Planar fBM (two independent components with a common Hurst index) started
/// at (1, 0), watched until it first crosses the half-line {y = 0, x <= 0}.
struct TipExperiment {
  double hurst = 0.5;
  /// Strictly decreasing, positive.
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05, 0.025};
  double horizon = 50.0;
  /// Power of two.
  std::size_t steps = std::size_t{1} << 16;
  std::size_t replicates = 100000;

  void validate() const;
};

struct TipEstimate {
  double hurst = 0.5;
  std::vector<double> epsilons;
  std::size_t replicates = 0;
  std::size_t total_hits = 0;
  /// Paths whose first hit lies in [-eps, 0], per epsilon. Non-increasing.
  std::vector<std::size_t> hits_in_tip;
  /// Conditional on a hit before the horizon.
  std::vector<double> p_hat;
  std::vector<double> std_error;
  double hit_fraction = 0.0;
  /// Fewer than 100 hits: no exponent is reported.
  bool insufficient = false;
  std::optional<stats::FitResult> exponent;
};

/// x-coordinate where the polyline first crosses {y = 0, x <= 0}, using
/// linear interpolation inside the crossing segment.
std::optional<double> first_ray_hit(std::span<const Point2> path);

/// Streaming variant on separate coordinate arrays; stops at the first hit.
std::optional<double> first_ray_hit(std::span<const double> xs, std::span<const double> ys);

TipEstimate run_tip(const TipExperiment& exp, const RngStream& rng, unsigned workers = 1);

/// Weighted least-squares slope of log p against log eps. Points with p <= 0
/// are dropped; throws if fewer than 3 remain.
stats::FitResult fit_exponent(std::span<const double> eps, std::span<const double> probs,
                              std::span<const double> weights);

/// Inverse-variance weights for log p_hat from binomial counts.
std::vector<double> log_weights(const TipEstimate& est);

struct SweepRow {
  double hurst = 0.0;
  TipEstimate estimate;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Smallest epsilon shared by every run.
  double common_epsilon = 0.0;
  /// p_hat(common_epsilon) strictly increases as H decreases.
  bool monotone_in_hurst = false;
  /// Exponent strictly increases with H.
  bool exponent_monotone = false;
};

SweepResult hurst_sweep(std::span<const double> h_values, const TipExperiment& templ,
                        const RngStream& rng, unsigned workers = 1);

/// Outcome of comparing p_hat(eps) between a rougher and a smoother run.
enum class Comparison { rougher_higher, inconclusive };

/// p_rough - p_smooth > 3 pooled standard errors at `eps` (which must be one
/// of both runs' epsilons).
Comparison compare_tip(const TipEstimate& rough, const TipEstimate& smooth, double eps,
                       double* z_score = nullptr);

}  // namespace hitlab::fbm_tip
