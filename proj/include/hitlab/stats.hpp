#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hitlab/rng.hpp"

namespace hitlab::stats {

/// Default resample count for bootstrap confidence half-widths.
inline constexpr std::size_t kBootstrapResamples = 1000;

/// Asymptotic Kolmogorov quantile at significance 1e-3; the KS threshold for
/// n samples is kKolmogorov999 / sqrt(n).
inline constexpr double kKolmogorov999 = 1.95;

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  /// 1.96 x slope standard error; always >= 0.
  double half_width = 0.0;
};

/// -sum p log2 p, with 0 log 0 = 0. Throws std::invalid_argument on negative
/// entries or when the sum is more than 1e-9 away from 1.
double entropy_base2(std::span<const double> probs);

/// Same as entropy_base2 but from integer counts (normalized by their total).
double entropy_from_counts(std::span<const std::size_t> counts);

/// Sup-norm distance between the empirical CDF of `samples` and `cdf`.
double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf);

/// Weighted least-squares line y = slope x + intercept.
///
/// With more than two points the slope standard error uses the weighted
/// residual variance; with exactly two points the weights are treated as
/// inverse variances. Throws on fewer than two points, non-positive weights or
/// when all x coincide.
FitResult wls_fit(std::span<const double> x, std::span<const double> y,
                  std::span<const double> w);

FitResult ols_fit(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
/// Unbiased sample variance.
double variance(std::span<const double> v);

double binomial_stderr(std::size_t successes, std::size_t trials);

double normal_cdf(double x);
double normal_quantile(double p);

/// One-sided Mann-Whitney U test of "a is stochastically smaller than b".
/// Returns the normal-approximation p-value with tie correction.
double rank_test_less(std::span<const double> a, std::span<const double> b);

/// Half-width of the central 95% percentile bootstrap interval of `statistic`
/// over resamples (with replacement) of `data`.
double bootstrap_half_width(
    std::span<const double> data,
    const std::function<double(std::span<const double>)>& statistic,
    const RngStream& rng, std::size_t resamples = kBootstrapResamples);

/// Empirical quantile (type 7, linear interpolation) of unsorted data.
double quantile(std::vector<double> data, double q);

}  // namespace hitlab::stats
