#include "hitlab/fbm_tip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hitlab/parallel.hpp"
#include "hitlab/paths.hpp"

namespace hitlab::fbm_tip {

void TipExperiment::validate() const {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("hurst must lie in (0, 1)");
  if (epsilons.empty()) throw std::invalid_argument("epsilons must not be empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw std::invalid_argument("epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw std::invalid_argument("epsilons must be strictly decreasing");
    }
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (steps < 2 || (steps & (steps - 1)) != 0) {
    throw std::invalid_argument("steps must be a power of two");
  }
  if (replicates < 1000) throw std::invalid_argument("replicates must be at least 1000");
}

namespace {

// Crossing of {y = 0, x <= 0} on the segment p -> q, given no hit at p.
inline std::optional<double> segment_hit(double px, double py, double qx, double qy) {
  if (qy == 0.0) {
    if (qx <= 0.0) return qx;
    return std::nullopt;
  }
  if ((py > 0.0 && qy < 0.0) || (py < 0.0 && qy > 0.0)) {
    const double x = px + (qx - px) * py / (py - qy);
    if (x <= 0.0) return x;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> first_ray_hit(std::span<const Point2> path) {
  if (path.empty()) return std::nullopt;
  if (path[0].y == 0.0 && path[0].x <= 0.0) return path[0].x;
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (auto x = segment_hit(path[i - 1].x, path[i - 1].y, path[i].x, path[i].y)) return x;
  }
  return std::nullopt;
}

std::optional<double> first_ray_hit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("first_ray_hit: size mismatch");
  if (xs.empty()) return std::nullopt;
  if (ys[0] == 0.0 && xs[0] <= 0.0) return xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (auto x = segment_hit(xs[i - 1], ys[i - 1], xs[i], ys[i])) return x;
  }
  return std::nullopt;
}

namespace {

// H = 1/2 has independent increments, so the path is generated step by step
// and abandoned at the first hit.
std::optional<double> brownian_tip_hit(const TipExperiment& exp, const RngStream& rng) {
  RandomSource src(rng);
  const double sd = std::sqrt(exp.horizon / static_cast<double>(exp.steps));
  double px = 1.0, py = 0.0;
  for (std::size_t i = 0; i < exp.steps; ++i) {
    const double qx = px + sd * src.normal();
    const double qy = py + sd * src.normal();
    if (auto x = segment_hit(px, py, qx, qy)) return x;
    px = qx;
    py = qy;
  }
  return std::nullopt;
}

}  // namespace

TipEstimate run_tip(const TipExperiment& exp, const RngStream& rng, unsigned workers) {
  exp.validate();
  std::vector<double> hit_x(exp.replicates, 1.0);  // 1.0 marks "no hit"
  if (exp.hurst == 0.5) {
    parallel_for(exp.replicates, workers, [&](std::size_t i) {
      if (auto x = brownian_tip_hit(exp, rng.replicate(i))) hit_x[i] = *x;
    });
  } else {
    const FbmGenerator gen(exp.hurst, TimeGrid::uniform(exp.horizon, exp.steps));
    parallel_for(exp.replicates, workers, [&](std::size_t i) {
      auto [a, b] = gen.sample_pair(rng.replicate(i));
      for (double& v : a.values) v += 1.0;
      if (auto x = first_ray_hit(a.values, b.values)) hit_x[i] = *x;
    });
  }

  TipEstimate est;
  est.hurst = exp.hurst;
  est.epsilons = exp.epsilons;
  est.replicates = exp.replicates;
  est.hits_in_tip.assign(exp.epsilons.size(), 0);
  for (double x : hit_x) {
    if (x > 0.0) continue;
    ++est.total_hits;
    for (std::size_t k = 0; k < exp.epsilons.size(); ++k) {
      if (x >= -exp.epsilons[k]) ++est.hits_in_tip[k];
    }
  }
  est.hit_fraction = static_cast<double>(est.total_hits) / static_cast<double>(exp.replicates);
  for (std::size_t k = 0; k < exp.epsilons.size(); ++k) {
    const double p = est.total_hits == 0 ? 0.0
                                         : static_cast<double>(est.hits_in_tip[k]) /
                                               static_cast<double>(est.total_hits);
    est.p_hat.push_back(p);
    est.std_error.push_back(stats::binomial_stderr(est.hits_in_tip[k], est.total_hits));
  }
  est.insufficient = est.total_hits < 100;
  if (!est.insufficient) {
    try {
      est.exponent = fit_exponent(est.epsilons, est.p_hat, log_weights(est));
    } catch (const std::invalid_argument&) {
      // Too few non-empty tips; leave the exponent unset.
    }
  }
  return est;
}

std::vector<double> log_weights(const TipEstimate& est) {
  std::vector<double> w;
  const auto n = static_cast<double>(est.total_hits);
  for (double p : est.p_hat) {
    // Var(log p_hat) ~ (1 - p) / (n p); a tip holding every hit gets the
    // weight of a single missing count.
    const double q = std::max(1.0 - p, 1.0 / std::max(n, 1.0));
    w.push_back(p > 0.0 ? n * p / q : 1.0);
  }
  return w;
}

stats::FitResult fit_exponent(std::span<const double> eps, std::span<const double> probs,
                              std::span<const double> weights) {
  if (eps.size() != probs.size() || eps.size() != weights.size()) {
    throw std::invalid_argument("fit_exponent: size mismatch");
  }
  std::vector<double> x, y, w;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(probs[i] > 0.0) || !(eps[i] > 0.0)) continue;
    x.push_back(std::log(eps[i]));
    y.push_back(std::log(probs[i]));
    w.push_back(weights[i]);
  }
  if (x.size() < 3) {
    throw std::invalid_argument("fit_exponent: fewer than 3 points with positive probability");
  }
  return stats::wls_fit(x, y, w);
}

SweepResult hurst_sweep(std::span<const double> h_values, const TipExperiment& templ,
                        const RngStream& rng, unsigned workers) {
  if (h_values.empty()) throw std::invalid_argument("hurst_sweep: no Hurst values");
  SweepResult out;
  for (std::size_t k = 0; k < h_values.size(); ++k) {
    TipExperiment exp = templ;
    exp.hurst = h_values[k];
    out.rows.push_back({h_values[k], run_tip(exp, rng.fork(static_cast<std::uint32_t>(k)), workers)});
  }
  out.common_epsilon = templ.epsilons.back();

  std::vector<const SweepRow*> by_h;
  for (const auto& r : out.rows) by_h.push_back(&r);
  std::sort(by_h.begin(), by_h.end(), [](auto* a, auto* b) { return a->hurst < b->hurst; });
  out.monotone_in_hurst = true;
  out.exponent_monotone = true;
  for (std::size_t i = 1; i < by_h.size(); ++i) {
    // Lower H should give the larger tip probability.
    if (!(by_h[i - 1]->estimate.p_hat.back() > by_h[i]->estimate.p_hat.back())) {
      out.monotone_in_hurst = false;
    }
    const auto& lo = by_h[i - 1]->estimate.exponent;
    const auto& hi = by_h[i]->estimate.exponent;
    if (!lo || !hi || !(lo->slope < hi->slope)) out.exponent_monotone = false;
  }
  return out;
}

Comparison compare_tip(const TipEstimate& rough, const TipEstimate& smooth, double eps,
                       double* z_score) {
  auto index_of = [eps](const TipEstimate& e) {
    for (std::size_t k = 0; k < e.epsilons.size(); ++k) {
      if (std::abs(e.epsilons[k] - eps) <= 1e-12 * eps) return k;
    }
    throw std::invalid_argument("compare_tip: epsilon " + std::to_string(eps) + " not in run");
  };
  const std::size_t i = index_of(rough);
  const std::size_t j = index_of(smooth);
  const double diff = rough.p_hat[i] - smooth.p_hat[j];
  const double pooled = std::hypot(rough.std_error[i], smooth.std_error[j]);
  const double z = pooled > 0.0 ? diff / pooled : 0.0;
  if (z_score != nullptr) *z_score = z;
  return z > 3.0 ? Comparison::rougher_higher : Comparison::inconclusive;
}

}  // namespace hitlab::fbm_tip
