#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hitlab/rng.hpp"
#include "hitlab/stats.hpp"

using namespace hitlab;
using namespace hitlab::stats;

TEST_CASE("entropy_base2 on small laws") {
  CHECK(entropy_base2(std::vector<double>{1.0}) == 0.0);
  CHECK(entropy_base2(std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(entropy_base2(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(entropy_base2(std::vector<double>{0.0, 1.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(entropy_base2(std::vector<double>{-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(entropy_base2(std::vector<double>{0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("entropy never exceeds log2 of the support size") {
  RandomSource src(RngStream{3});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + src.below(40);
    std::vector<double> p(k);
    double total = 0;
    for (double& v : p) total += (v = src.uniform() * (src.below(3) == 0 ? 0.0 : 1.0));
    if (total == 0) continue;
    for (double& v : p) v /= total;
    CHECK(entropy_base2(p) <= std::log2(static_cast<double>(k)) + 1e-12);
  }
}

TEST_CASE("ks_distance edge cases") {
  auto uniform_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_distance(std::vector<double>(10, 0.5), uniform_cdf) == doctest::Approx(0.5));
  CHECK(ks_distance(std::vector<double>{0.0}, uniform_cdf) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ks_distance(std::vector<double>{}, uniform_cdf), std::invalid_argument);

  RandomSource src(RngStream{11});
  std::vector<double> u(5000);
  for (double& v : u) v = src.uniform();
  const double d = ks_distance(u, uniform_cdf);
  CHECK(d >= 0.0);
  CHECK(d <= 1.0);
  CHECK(d < kKolmogorov999 / std::sqrt(5000.0));
}

TEST_CASE("wls_fit is exact on exact lines") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  const auto fit = wls_fit(x, y, std::vector<double>{1, 2, 3, 4, 5});
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fit.half_width >= 0.0);
  CHECK(fit.half_width < 1e-12);
}

TEST_CASE("wls_fit rejects degenerate inputs") {
  CHECK_THROWS_AS(wls_fit(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3},
                          std::vector<double>{1, 1, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(wls_fit(std::vector<double>{1}, std::vector<double>{1}, std::vector<double>{1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(wls_fit(std::vector<double>{1, 2}, std::vector<double>{1, 2},
                          std::vector<double>{1, 0}),
                  std::invalid_argument);
}

TEST_CASE("wls_fit half-width covers planted slopes") {
  // 1e3 noisy lines; the slope must fall within 3 half-widths in >= 95%.
  int covered = 0;
  const std::vector<double> x{0, 1, 2, 3, 4, 5, 6, 7};
  for (int trial = 0; trial < 1000; ++trial) {
    RandomSource src(RngStream{21}.replicate(static_cast<std::uint64_t>(trial)));
    std::vector<double> y, w;
    for (double v : x) {
      const double sd = 0.1 + 0.05 * v;
      y.push_back(0.7 * v - 0.3 + sd * src.normal());
      w.push_back(1.0 / (sd * sd));
    }
    const auto fit = wls_fit(x, y, w);
    if (std::abs(fit.slope - 0.7) <= 3 * fit.half_width) ++covered;
  }
  CHECK(covered >= 950);
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double p : {1e-6, 0.01, 0.25, 0.5, 0.75, 0.975, 1 - 1e-9}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
}

TEST_CASE("rank test separates shifted samples and not identical ones") {
  RandomSource src(RngStream{31});
  std::vector<double> a(300), b(300), c(300);
  for (auto& v : a) v = src.normal() - 0.5;
  for (auto& v : b) v = src.normal();
  for (auto& v : c) v = src.normal();
  CHECK(rank_test_less(a, b) < 1e-3);
  CHECK(rank_test_less(b, a) > 0.5);
  CHECK(rank_test_less(b, c) > 1e-3);
  // all ties
  CHECK(rank_test_less(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0)) == 1.0);
}

TEST_CASE("bootstrap half-width of a mean matches the standard error") {
  RandomSource src(RngStream{41});
  std::vector<double> x(2000);
  for (auto& v : x) v = src.normal();
  const double hw = bootstrap_half_width(x, [](std::span<const double> s) { return mean(s); },
                                         RngStream{42});
  const double se = 1.0 / std::sqrt(2000.0);
  CHECK(hw == doctest::Approx(1.96 * se).epsilon(0.15));
}

TEST_CASE("binomial standard error") {
  CHECK(binomial_stderr(0, 0) == 0.0);
  CHECK(binomial_stderr(50, 100) == doctest::Approx(0.05));
}
