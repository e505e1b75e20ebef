#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "hitlab/fbm_tip.hpp"

using namespace hitlab;
using namespace hitlab::fbm_tip;

TEST_CASE("doubling the step count at H = 1/2") {
  TipExperiment e;
  e.replicates = 10000;
  e.steps = 1 << 15;
  const auto coarse = run_tip(e, RngStream{301}, 0);
  e.steps = 1 << 16;
  const auto fine = run_tip(e, RngStream{302}, 0);
  for (std::size_t k = 0; k < e.epsilons.size(); ++k) {
    CAPTURE(e.epsilons[k]);
    const double pooled = std::hypot(coarse.std_error[k], fine.std_error[k]);
    CHECK(std::abs(coarse.p_hat[k] - fine.p_hat[k]) < 3 * pooled);
  }
}

TEST_CASE("Hurst sweep (reported as findings)") {
  TipExperiment templ;
  templ.replicates = 4000;
  templ.steps = 1 << 13;
  const std::vector<double> hs{0.3, 0.5, 0.7};
  const auto sweep = hurst_sweep(hs, templ, RngStream{303}, 0);
  REQUIRE(sweep.rows.size() == 3);
  for (const auto& r : sweep.rows) {
    CHECK_FALSE(r.estimate.insufficient);
    if (r.estimate.exponent) {
      MESSAGE("H " << r.hurst << ": exponent " << r.estimate.exponent->slope << " +- "
                   << r.estimate.exponent->half_width << ", hit fraction " << r.estimate.hit_fraction);
    }
    for (std::size_t k = 1; k < r.estimate.hits_in_tip.size(); ++k) {
      CHECK(r.estimate.hits_in_tip[k] <= r.estimate.hits_in_tip[k - 1]);
    }
  }
  double z = 0.0;
  const auto outcome = compare_tip(sweep.rows[0].estimate, sweep.rows[2].estimate, 0.1, &z);
  MESSAGE("p(0.1): H 0.3 vs 0.7, z = " << z << std::string(outcome == Comparison::rougher_higher ? " (rougher higher)" : " (inconclusive)"));
  MESSAGE("monotone in H at eps " << sweep.common_epsilon << ": " << sweep.monotone_in_hurst);

  // The H = 1/2 entry matches a standalone run on the same stream.
  TipExperiment half = templ;
  half.hurst = 0.5;
  const auto single = run_tip(half, RngStream{303}.fork(1), 0);
  CHECK(single.hits_in_tip == sweep.rows[1].estimate.hits_in_tip);
}
