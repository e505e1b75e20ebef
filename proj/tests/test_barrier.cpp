#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hitlab/barrier.hpp"
#include "hitlab/stats.hpp"

using namespace hitlab;
using namespace hitlab::barrier;

namespace {

std::string message_of(const BarrierConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("barrier config validation and derived constants") {
  BarrierConfig cfg{1.0, 1.0, 10.0, 1e-3};
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.c_tilde() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(cfg.alpha() == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(cfg.threshold() == doctest::Approx(0.8535533905932737));

  CHECK(message_of({1.0, -1.0, 10.0, 1e-3}).find("sigma") != std::string::npos);
  CHECK(message_of({0.0, 1.0, 10.0, 1e-3}).find("c ") == 0);
  CHECK(message_of({1.0, 1.0, 1.0, 2.0}).find("step") != std::string::npos);
  CHECK(message_of({1.0, 0.0, 1.0, 0.1}).find("sigma") != std::string::npos);
  CHECK_NOTHROW(BarrierConfig({1.0, 0.0, 1.0, 0.1}).validate(true));
}

TEST_CASE("straight crossing interpolates to the midpoint") {
  const double h = 0.1;
  BarrierConfig cfg{1.0, 0.0, h * 2, h};
  const auto g = TimeGrid::uniform(2 * h, 2);
  const Path b{g, {0.0, 2.0, 2.0}};
  const Path w{g, {0.0, 0.0, 0.0}};
  const auto r = first_crossing(b, w, cfg);
  CHECK(r.hit);
  CHECK(r.index == 0);
  CHECK(r.tau == doctest::Approx(h / 2));
}

TEST_CASE("touching the barrier counts as a hit and missing it does not") {
  const auto g = TimeGrid::uniform(1.0, 2);
  BarrierConfig cfg{1.0, 1.0, 1.0, 0.5};
  const Path w{g, {0.0, 0.0, 0.0}};
  auto r = first_crossing(Path{g, {0.0, 0.5, 1.0}}, w, cfg);
  CHECK(r.hit);
  CHECK(r.index == 1);
  CHECK(r.tau == 1.0);
  r = first_crossing(Path{g, {0.0, 0.5, 0.9}}, w, cfg);
  CHECK_FALSE(r.hit);
  CHECK_THROWS_AS(first_crossing(Path{TimeGrid::uniform(2.0, 2), {0.0, 0.1, 0.2}}, w, cfg),
                  std::invalid_argument);
}

TEST_CASE("crossing of (B, W) equals crossing of the rotated X against c_tilde") {
  for (double sigma : {0.5, 1.0, 2.0}) {
    BarrierConfig cfg{1.0, sigma, 5.0, 1e-2};
    const auto g = cfg.grid();
    for (std::uint64_t i = 0; i < 50; ++i) {
      const RngStream s = RngStream{3}.replicate(i);
      const Path b = sample_bm(g, s.fork(0));
      const Path w = sample_bm(g, s.fork(1));
      const auto direct = first_crossing(b, w, cfg);
      const auto [x, y] = rotate_pair(b, w, sigma);
      const auto rotated = first_crossing_level(x, cfg.c_tilde());
      REQUIRE(direct.hit == rotated.hit);
      if (direct.hit) {
        CHECK(direct.index == rotated.index);
        CHECK(std::abs(direct.tau - rotated.tau) <= 1e-12 * direct.tau);
      }
      // Lazy simulation reproduces the same realization.
      const auto lazy = simulate_crossing(cfg, s);
      CHECK(lazy.hit == direct.hit);
      if (lazy.hit) {
        CHECK(lazy.index == direct.index);
        CHECK(lazy.tau == direct.tau);
      }
    }
  }
}

TEST_CASE("rotation is orthogonal and W is recovered") {
  const double sigma = 1.7;
  const auto g = TimeGrid::uniform(1.0, 100);
  const Path b = sample_bm(g, RngStream{4, 0});
  const Path w = sample_bm(g, RngStream{4, 1});
  const auto [x, y] = rotate_pair(b, w, sigma);
  const double n = std::sqrt(1 + sigma * sigma);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double lhs = x.values[i] * x.values[i] + y.values[i] * y.values[i];
    const double rhs = b.values[i] * b.values[i] + w.values[i] * w.values[i];
    CHECK(std::abs(lhs - rhs) <= 1e-14 * std::max(1.0, rhs));
    const double w_back = -sigma / n * x.values[i] + 1.0 / n * y.values[i];
    CHECK(std::abs(w_back - w.values[i]) <= 1e-14 * std::max(1.0, std::abs(w.values[i])));
  }
}

TEST_CASE("exact first-passage sampler") {
  CHECK_THROWS_AS(sample_tau_exact(0.0, RngStream{}), std::invalid_argument);
  const std::size_t n = 1000000;
  std::vector<double> tau(n);
  for (std::size_t i = 0; i < n; ++i) tau[i] = sample_tau_exact(1.0, RngStream{5}.replicate(i));

  SUBCASE("cdf at fixed times") {
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
      const double p = tau_cdf(1.0, t);
      const double emp = static_cast<double>(std::count_if(tau.begin(), tau.end(), [t](double v) { return v <= t; })) / n;
      CHECK(std::abs(emp - p) < 4.0 * std::sqrt(p * (1 - p) / n));
    }
  }
  SUBCASE("median") {
    const double z = stats::normal_quantile(0.75);
    const double median = 1.0 / (z * z);
    CHECK(std::abs(stats::quantile(tau, 0.5) - median) < 0.01 * median);
  }
  SUBCASE("brownian scaling") {
    std::vector<double> tau2(200000), tau1(tau.begin(), tau.begin() + 200000);
    for (std::size_t i = 0; i < tau2.size(); ++i) tau2[i] = sample_tau_exact(2.0, RngStream{6}.replicate(i));
    std::vector<double> q1, q2;
    for (double q = 0.05; q < 0.951; q += 0.05) {
      q1.push_back(stats::quantile(tau1, q));
      q2.push_back(stats::quantile(tau2, q));
    }
    const double slope = stats::ols_fit(q1, q2).slope;
    CHECK(std::abs(slope - 4.0) < 0.08);
  }
}

TEST_CASE("lil statistic input checks") {
  const auto g = TimeGrid::uniform(1e-2, 1000);  // step 1e-5
  const Path zero{g, std::vector<double>(g.size(), 0.0)};
  const auto scales = lil_scales(1e-2, 1e-4);
  CHECK(scales.size() == 7);
  CHECK(lil_statistic(zero, scales).value == 0.0);
  CHECK_THROWS_AS(lil_scales(0.5, 1e-3), std::invalid_argument);
  const std::vector<double> too_fine{1e-2, 3.3e-5};
  CHECK_THROWS_AS(lil_statistic(zero, too_fine), std::invalid_argument);
  const std::vector<double> increasing{1e-3, 1e-2};
  CHECK_THROWS_AS(lil_statistic(zero, increasing), std::invalid_argument);
  const std::vector<double> big{0.37};
  CHECK_THROWS_AS(lil_statistic(Path{TimeGrid::uniform(1.0, 1000), std::vector<double>(1001, 0.0)}, big),
                  std::invalid_argument);

  // Scales that are grid points are exact even on a coarse geometric grid.
  const auto geo = TimeGrid::geometric(1e-4, 1e-2, 0.5);
  Path ramp{geo, std::vector<double>(geo.times().begin(), geo.times().end())};
  const auto scales_geo = lil_scales(geo.horizon(), 1e-4);
  const auto stat = lil_statistic(ramp, scales_geo);
  double expect = 0;
  for (double s : scales_geo) expect = std::max(expect, s / std::sqrt(2 * s * std::log(std::log(1 / s))));
  CHECK(stat.value == doctest::Approx(expect));
}

TEST_CASE("discriminate labels a flat path as mixture-like") {
  const auto g = TimeGrid::uniform(1e-2, 1000);
  const std::vector<Path> paths{Path{g, std::vector<double>(g.size(), 0.0)}};
  const BarrierConfig cfg{1.0, 1.0, 1.0, 1e-3};
  const auto labels = discriminate(paths, cfg, lil_scales(1e-2, 1e-4));
  REQUIRE(labels.size() == 1);
  CHECK(labels[0] == PathLabel::mixture_like);
  CHECK(std::string(to_string(labels[0])) == "mixture-like");
}

TEST_CASE("conditional profile with one replicate is a point mass") {
  const BarrierConfig cfg{0.2, 1.0, 2.0, 1.0 / 1024};
  const Path w = sample_bm(cfg.grid(), RngStream{8});
  const auto prof = conditional_tau_profile(w, cfg, 1, RngStream{9});
  CHECK(prof.hits == 1);
  CHECK(prof.insufficient);
  for (double h : prof.entropy) CHECK(h == 0.0);
  CHECK(prof.counts_at_depth(4).size() == 16);
}

TEST_CASE("conditional profile is deterministic across worker counts") {
  const BarrierConfig cfg{0.5, 1.0, 1.0, 1.0 / 512};
  const Path w = sample_bm(cfg.grid(), RngStream{10});
  const auto a = conditional_tau_profile(w, cfg, 500, RngStream{11}, 1);
  const auto b = conditional_tau_profile(w, cfg, 500, RngStream{11}, 3);
  CHECK(a.finest_counts == b.finest_counts);
  CHECK(a.entropy == b.entropy);
}

TEST_CASE("hit probability estimate is deterministic across worker counts") {
  const BarrierConfig cfg{1.0, 1.0, 2.0, 1e-2};
  const auto a = estimate_hit_probability(cfg, 2000, RngStream{12}, 1);
  const auto b = estimate_hit_probability(cfg, 2000, RngStream{12}, 4);
  CHECK(a.hits == b.hits);
}
