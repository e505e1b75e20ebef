#include "hitlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/erf.hpp>

namespace hitlab::stats {

double entropy_base2(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("entropy_base2: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("entropy_base2: probabilities sum to " +
                                std::to_string(total) + ", expected 1");
  }
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

double entropy_from_counts(std::span<const std::size_t> counts) {
  const double total = static_cast<double>(
      std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  if (total == 0.0) throw std::invalid_argument("entropy_from_counts: no mass");
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    // Ties jump the empirical CDF by their multiplicity at once.
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double f = std::clamp(cdf(sorted[i]), 0.0, 1.0);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n),
                  std::abs(static_cast<double>(j) / n - f)});
    i = j;
  }
  return std::min(d, 1.0);
}

FitResult wls_fit(std::span<const double> x, std::span<const double> y,
                  std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size()) {
    throw std::invalid_argument("wls_fit: size mismatch");
  }
  if (x.size() < 2) throw std::invalid_argument("wls_fit: need at least 2 points");
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
      throw std::invalid_argument("wls_fit: weights must be positive and finite");
    }
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  double xscale = 0.0;
  for (double xi : x) xscale = std::max(xscale, std::abs(xi));
  if (sxx <= 1e-24 * std::max(1.0, xscale * xscale) * sw) {
    throw std::invalid_argument("wls_fit: x values are degenerate");
  }
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += w[i] * r * r;
    }
    fit.slope_se = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
  } else {
    fit.slope_se = std::sqrt(1.0 / sxx);
  }
  fit.half_width = 1.96 * fit.slope_se;
  return fit;
}

FitResult ols_fit(std::span<const double> x, std::span<const double> y) {
  const std::vector<double> w(x.size(), 1.0);
  return wls_fit(x, y, w);
}

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean: empty input");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("variance: need at least 2 values");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double binomial_stderr(std::size_t successes, std::size_t trials) {
  if (trials == 0) return 0.0;
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p outside (0,1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double rank_test_less(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("rank_test_less: empty sample");
  struct Item {
    double v;
    bool from_a;
  };
  std::vector<Item> all;
  all.reserve(a.size() + b.size());
  for (double v : a) all.push_back({v, true});
  for (double v : b) all.push_back({v, false});
  std::sort(all.begin(), all.end(), [](const Item& l, const Item& r) { return l.v < r.v; });

  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].from_a) rank_sum_a += avg_rank;
    }
    i = j;
  }
  const double u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
  const double mu = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;
  // Small U means a tends to rank below b.
  return normal_cdf((u - mu + 0.5) / std::sqrt(var));
}

double bootstrap_half_width(
    std::span<const double> data,
    const std::function<double(std::span<const double>)>& statistic,
    const RngStream& rng, std::size_t resamples) {
  if (data.empty()) throw std::invalid_argument("bootstrap_half_width: empty data");
  if (data.size() > 0xFFFFFFFFu) throw std::invalid_argument("bootstrap_half_width: too much data");
  std::vector<double> values;
  values.reserve(resamples);
  std::vector<double> sample(data.size());
  for (std::size_t r = 0; r < resamples; ++r) {
    RandomSource src(rng.replicate(r));
    for (double& s : sample) s = data[src.below(static_cast<std::uint32_t>(data.size()))];
    values.push_back(statistic(sample));
  }
  return 0.5 * (quantile(values, 0.975) - quantile(std::move(values), 0.025));
}

double quantile(std::vector<double> data, double q) {
  if (data.empty()) throw std::invalid_argument("quantile: empty data");
  std::sort(data.begin(), data.end());
  const double pos = q * static_cast<double>(data.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, data.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return data[lo] + frac * (data[hi] - data[lo]);
}

}  // namespace hitlab::stats
