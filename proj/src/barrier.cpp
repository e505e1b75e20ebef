#include "hitlab/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hitlab/parallel.hpp"
#include "hitlab/stats.hpp"

namespace hitlab::barrier {

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be a positive finite number (got " +
                                std::to_string(v) + ")");
  }
}

void require_same_grid(const Path& a, const Path& b) {
  if (!a.grid.same_as(b.grid) || a.values.size() != b.values.size() ||
      a.values.size() != a.grid.size()) {
    throw std::invalid_argument("paths must share the same grid");
  }
}

// g is B - sigma W - c (or X - c_tilde); it starts negative. Returns true once
// g reaches 0 on step [i, i+1].
inline bool crossing_step(double g_prev, double g_next, double t_prev, double t_next,
                          std::size_t i, CrossingResult& out) {
  if (g_next < 0.0) return false;
  out.hit = true;
  out.index = i;
  out.tau = g_next == 0.0 ? t_next : t_prev + (t_next - t_prev) * (-g_prev) / (g_next - g_prev);
  return true;
}

template <class Gap>
CrossingResult scan(std::span<const double> t, Gap&& gap) {
  CrossingResult r;
  double prev = gap(0);
  if (prev >= 0.0) throw std::invalid_argument("first_crossing: barrier must start above the path");
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double next = gap(i + 1);
    if (crossing_step(prev, next, t[i], t[i + 1], i, r)) return r;
    prev = next;
  }
  return r;
}

// Lazily simulated B against c + sigma w, with w given on the grid or
// simulated alongside (when w_fixed is empty).
CrossingResult stream_crossing(std::span<const double> t, double c, double sigma,
                               std::span<const double> w_fixed, const RngStream& rng) {
  RandomSource b_src(rng.fork(0));
  RandomSource w_src(rng.fork(1));
  const bool simulate_w = w_fixed.empty();
  double b = 0.0;
  double w = 0.0;
  double prev = -c;
  CrossingResult r;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double sd = std::sqrt(t[i] - t[i - 1]);
    b = b + sd * b_src.normal();
    if (simulate_w) {
      w = w + sd * w_src.normal();
    } else {
      w = w_fixed[i];
    }
    const double next = b - sigma * w - c;
    if (crossing_step(prev, next, t[i - 1], t[i], i - 1, r)) return r;
    prev = next;
  }
  return r;
}

}  // namespace

// ------------------------------------------------------------ BarrierConfig

void BarrierConfig::validate(bool allow_zero_sigma) const {
  require_positive(c, "c");
  if (allow_zero_sigma && sigma == 0.0) {
    // degenerate constant barrier
  } else {
    require_positive(sigma, "sigma");
  }
  require_positive(horizon, "horizon");
  require_positive(step, "step");
  if (!(step < horizon)) {
    throw std::invalid_argument("step must be smaller than horizon (got step=" +
                                std::to_string(step) + ", horizon=" + std::to_string(horizon) +
                                ")");
  }
}

double BarrierConfig::c_tilde() const { return c / std::sqrt(1.0 + sigma * sigma); }

double BarrierConfig::alpha() const { return -sigma / std::sqrt(1.0 + sigma * sigma); }

double BarrierConfig::threshold() const {
  const double a = alpha();
  return 0.5 * (1.0 + std::sqrt(1.0 - a * a));
}

TimeGrid BarrierConfig::grid() const {
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
  return TimeGrid::uniform(horizon, std::max<std::size_t>(steps, 1));
}

// ---------------------------------------------------------------- crossing

CrossingResult first_crossing(const Path& b, const Path& w, const BarrierConfig& cfg) {
  require_same_grid(b, w);
  const double c = cfg.c;
  const double sigma = cfg.sigma;
  return scan(b.grid.times(), [&](std::size_t i) { return b.values[i] - sigma * w.values[i] - c; });
}

CrossingResult first_crossing_level(const Path& x, double level) {
  if (x.values.size() != x.grid.size()) throw std::invalid_argument("path/grid size mismatch");
  return scan(x.grid.times(), [&](std::size_t i) { return x.values[i] - level; });
}

std::pair<Path, Path> rotate_pair(const Path& b, const Path& w, double sigma) {
  require_same_grid(b, w);
  const double norm = std::sqrt(1.0 + sigma * sigma);
  const double cs = 1.0 / norm;
  const double sn = sigma / norm;
  Path x{b.grid, std::vector<double>(b.values.size())};
  Path y{b.grid, std::vector<double>(b.values.size())};
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    x.values[i] = cs * b.values[i] - sn * w.values[i];
    y.values[i] = sn * b.values[i] + cs * w.values[i];
  }
  return {std::move(x), std::move(y)};
}

double sample_tau_exact(double c_tilde, const RngStream& rng) {
  if (!(c_tilde > 0.0)) throw std::invalid_argument("sample_tau_exact: c_tilde must be positive");
  RandomSource src(rng);
  const double z = src.normal();
  return c_tilde * c_tilde / (z * z);
}

double tau_cdf(double c_tilde, double t) {
  if (t <= 0.0) return 0.0;
  return 2.0 * stats::normal_cdf(-c_tilde / std::sqrt(t));
}

CrossingResult simulate_crossing(const BarrierConfig& cfg, const RngStream& rng) {
  cfg.validate();
  const TimeGrid grid = cfg.grid();
  return stream_crossing(grid.times(), cfg.c, cfg.sigma, {}, rng);
}

HitEstimate estimate_hit_probability(const BarrierConfig& cfg, std::size_t replicates,
                                     const RngStream& rng, unsigned workers) {
  cfg.validate();
  const TimeGrid grid = cfg.grid();
  std::vector<char> hit(replicates, 0);
  parallel_for(replicates, workers, [&](std::size_t i) {
    hit[i] = stream_crossing(grid.times(), cfg.c, cfg.sigma, {}, rng.replicate(i)).hit ? 1 : 0;
  });
  HitEstimate est;
  est.replicates = replicates;
  est.hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  est.p = replicates == 0 ? 0.0 : static_cast<double>(est.hits) / static_cast<double>(replicates);
  est.std_error = stats::binomial_stderr(est.hits, replicates);
  return est;
}

// --------------------------------------------------------------------- LIL

std::vector<double> lil_scales(double largest, double smallest) {
  if (!(largest < kInvE)) throw std::invalid_argument("lil_scales: largest scale must be < 1/e");
  if (!(smallest > 0.0) || smallest > largest) {
    throw std::invalid_argument("lil_scales: need 0 < smallest <= largest");
  }
  std::vector<double> s;
  for (double v = largest; v >= smallest * (1.0 - 1e-12); v *= 0.5) s.push_back(v);
  return s;
}

LilStatistic lil_statistic(const Path& path, std::span<const double> scales) {
  if (scales.empty()) throw std::invalid_argument("lil_statistic: no scales");
  const auto t = path.grid.times();
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const double s = scales[k];
    if (!(s > 0.0) || !(s < kInvE)) {
      throw std::invalid_argument("lil_statistic: scale " + std::to_string(s) +
                                  " outside (0, 1/e)");
    }
    if (k > 0 && !(s < scales[k - 1])) {
      throw std::invalid_argument("lil_statistic: scales must be strictly decreasing");
    }
    if (s > t.back()) throw std::invalid_argument("lil_statistic: scale beyond path horizon");
  }
  // Resolution at the smallest scale: exact when it is a grid point,
  // otherwise the enclosing step must be at most a tenth of it.
  const double smallest = scales.back();
  const auto it = std::lower_bound(t.begin(), t.end(), smallest);
  const auto idx = static_cast<std::size_t>(it - t.begin());
  const bool on_grid = it != t.end() && std::abs(*it - smallest) <= 1e-12 * smallest;
  if (!on_grid) {
    const double cell = t[idx] - t[idx - 1];
    if (cell * 10.0 > smallest * (1.0 + 1e-9)) {
      throw std::invalid_argument("lil_statistic: smallest scale is below 10 grid steps");
    }
  }
  LilStatistic out;
  out.scales.assign(scales.begin(), scales.end());
  out.value = -std::numeric_limits<double>::infinity();
  for (double s : scales) {
    const double v = path.at(s) / std::sqrt(2.0 * s * std::log(std::log(1.0 / s)));
    out.value = std::max(out.value, v);
  }
  return out;
}

const char* to_string(PathLabel label) {
  return label == PathLabel::bm_like ? "BM-like" : "mixture-like";
}

std::vector<PathLabel> discriminate(std::span<const Path> paths, const BarrierConfig& cfg,
                                    std::span<const double> scales) {
  const double theta = cfg.threshold();
  std::vector<PathLabel> labels;
  labels.reserve(paths.size());
  for (const Path& p : paths) {
    labels.push_back(lil_statistic(p, scales).value > theta ? PathLabel::bm_like
                                                            : PathLabel::mixture_like);
  }
  return labels;
}

// --------------------------------------------------- conditional profile

std::vector<std::size_t> TauProfile::counts_at_depth(int depth) const {
  if (depth < 0 || depth > kMaxDepth) throw std::out_of_range("TauProfile: depth out of range");
  const std::size_t cells = std::size_t{1} << depth;
  const std::size_t merge = finest_counts.size() / cells;
  std::vector<std::size_t> out(cells, 0);
  for (std::size_t i = 0; i < finest_counts.size(); ++i) out[i / merge] += finest_counts[i];
  return out;
}

double TauProfile::slope_between(int lo, int hi) const {
  if (lo < kMinDepth || hi > kMaxDepth || hi <= lo) {
    throw std::out_of_range("TauProfile: bad depth range");
  }
  std::vector<double> x, y;
  for (int d = lo; d <= hi; ++d) {
    x.push_back(d);
    y.push_back(entropy[static_cast<std::size_t>(d - kMinDepth)]);
  }
  return stats::ols_fit(x, y).slope;
}

TauProfile conditional_tau_profile(const Path& w, const BarrierConfig& cfg,
                                   std::size_t replicates, const RngStream& rng,
                                   unsigned workers) {
  cfg.validate(/*allow_zero_sigma=*/true);
  if (w.values.size() != w.grid.size() || w.values.front() != 0.0) {
    throw std::invalid_argument("conditional_tau_profile: w must be a path started at 0");
  }
  const auto t = w.grid.times();
  const double horizon = w.grid.horizon();
  std::vector<double> tau(replicates, -1.0);
  parallel_for(replicates, workers, [&](std::size_t i) {
    const auto r = stream_crossing(t, cfg.c, cfg.sigma, w.values, rng.replicate(i));
    if (r.hit) tau[i] = r.tau;
  });

  TauProfile prof;
  prof.replicates = replicates;
  const std::size_t cells = std::size_t{1} << TauProfile::kMaxDepth;
  prof.finest_counts.assign(cells, 0);
  for (double v : tau) {
    if (v < 0.0) continue;
    ++prof.hits;
    const auto cell = static_cast<std::size_t>(v / horizon * static_cast<double>(cells));
    ++prof.finest_counts[std::min(cell, cells - 1)];
  }
  prof.insufficient = prof.hits < 100;
  for (int d = TauProfile::kMinDepth; d <= TauProfile::kMaxDepth; ++d) {
    prof.entropy.push_back(prof.hits == 0 ? 0.0 : stats::entropy_from_counts(prof.counts_at_depth(d)));
  }
  prof.slope = prof.slope_between(TauProfile::kMinDepth, TauProfile::kMaxDepth);
  return prof;
}

}  // namespace hitlab::barrier
