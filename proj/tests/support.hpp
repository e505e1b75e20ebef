#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace hitlab::testing {

/// Sample mean of x*y for zero-mean data, with its standard error.
struct CovarianceEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

inline CovarianceEstimate zero_mean_covariance(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = x[i] * y[i];
    s += p;
    s2 += p * p;
  }
  const double mean = s / n;
  const double var = (s2 / n - mean * mean) * n / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace hitlab::testing
