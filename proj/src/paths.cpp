#include "hitlab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <fftw3.h>

namespace hitlab {

// ---------------------------------------------------------------- TimeGrid

TimeGrid::TimeGrid(std::vector<double> times, bool uniform)
    : times_(std::make_shared<const std::vector<double>>(std::move(times))),
      uniform_(uniform) {
  const auto& t = *times_;
  min_step_ = t.size() > 1 ? t[1] - t[0] : 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) min_step_ = std::min(min_step_, t[i] - t[i - 1]);
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("TimeGrid::uniform: horizon must be positive");
  }
  if (steps < 1) throw std::invalid_argument("TimeGrid::uniform: need at least one step");
  std::vector<double> t(steps + 1);
  const double h = horizon / static_cast<double>(steps);
  for (std::size_t i = 0; i <= steps; ++i) t[i] = h * static_cast<double>(i);
  t.back() = horizon;
  return TimeGrid(std::move(t), true);
}

TimeGrid TimeGrid::geometric(double smallest, double largest, double ratio) {
  if (!(smallest > 0.0) || !(largest >= smallest) || !(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("TimeGrid::geometric: need 0 < smallest <= largest, 0 < ratio < 1");
  }
  std::vector<double> t;
  for (double s = largest; s >= smallest * (1.0 - 1e-12); s *= ratio) t.push_back(s);
  t.push_back(0.0);
  std::reverse(t.begin(), t.end());
  const bool two = t.size() == 2;
  return TimeGrid(std::move(t), two);
}

TimeGrid TimeGrid::from_times(std::vector<double> times) {
  if (times.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
  if (times[0] != 0.0) throw std::invalid_argument("TimeGrid: times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1]) || !std::isfinite(times[i])) {
      throw std::invalid_argument("TimeGrid: times must be strictly increasing at index " +
                                  std::to_string(i));
    }
  }
  const double h = times[1];
  bool uniform = true;
  for (std::size_t i = 1; i < times.size() && uniform; ++i) {
    uniform = std::abs((times[i] - times[i - 1]) - h) <= 1e-9 * h;
  }
  return TimeGrid(std::move(times), uniform);
}

bool TimeGrid::same_as(const TimeGrid& other) const {
  return times_ == other.times_ || *times_ == *other.times_;
}

double Path::at(double t) const {
  const auto ts = grid.times();
  if (!(t >= 0.0) || t > ts.back()) throw std::out_of_range("Path::at: time outside grid");
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  if (it == ts.end()) return values.back();
  const auto hi = static_cast<std::size_t>(it - ts.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

// -------------------------------------------------------------- BM family

namespace {

void require_grid(const TimeGrid& grid) {
  if (grid.size() < 2) throw std::invalid_argument("grid must have at least 2 points");
}

}  // namespace

Path sample_bm(const TimeGrid& grid, const RngStream& rng) {
  require_grid(grid);
  RandomSource src(rng);
  const auto t = grid.times();
  std::vector<double> v(t.size());
  v[0] = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    v[i] = v[i - 1] + std::sqrt(t[i] - t[i - 1]) * src.normal();
  }
  return {grid, std::move(v)};
}

Path sample_bes3(const TimeGrid& grid, const RngStream& rng) {
  require_grid(grid);
  RandomSource src(rng);
  const auto t = grid.times();
  std::vector<double> v(t.size());
  double x = 0.0, y = 0.0, z = 0.0;
  v[0] = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double sd = std::sqrt(t[i] - t[i - 1]);
    x += sd * src.normal();
    y += sd * src.normal();
    z += sd * src.normal();
    v[i] = std::sqrt(x * x + y * y + z * z);
  }
  return {grid, std::move(v)};
}

Path sample_mixture(double alpha, const TimeGrid& grid, const RngStream& rng) {
  if (!(std::abs(alpha) < 1.0)) {
    throw std::invalid_argument("sample_mixture: |alpha| must be < 1");
  }
  Path r = sample_bes3(grid, rng.fork(1));
  const Path m = sample_bm(grid, rng.fork(2));
  const double beta = std::sqrt(1.0 - alpha * alpha);
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    r.values[i] = alpha * r.values[i] + beta * m.values[i];
  }
  return r;
}

// -------------------------------------------------------------------- fBM

double fbm_covariance(double hurst, double s, double t) {
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double increment_autocov(double hurst, std::size_t lag) {
  const double k = static_cast<double>(lag);
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(std::abs(k - 1.0), h2));
}

}  // namespace

struct FbmGenerator::Impl {
  // circulant
  std::size_t m = 0;                 // embedding size 2N
  std::vector<double> sqrt_eig;      // sqrt(lambda_k / m) x step^H
  fftw_plan plan = nullptr;
  // cholesky
  Eigen::MatrixXd chol;

  ~Impl() {
    if (plan != nullptr) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

FbmGenerator::FbmGenerator(double hurst, const TimeGrid& grid, FbmMethod preferred)
    : hurst_(hurst), grid_(grid), method_(preferred), impl_(std::make_unique<Impl>()) {
  if (!(hurst > 0.0 && hurst < 1.0)) {
    throw std::invalid_argument("fbm: hurst must lie in (0, 1)");
  }
  if (!grid.is_uniform()) throw std::invalid_argument("fbm: grid must be uniform");
  const std::size_t n = grid.steps();
  const double step = grid[1];

  if (method_ == FbmMethod::circulant) {
    if (!is_power_of_two(n)) {
      throw std::invalid_argument("fbm: circulant embedding needs a power-of-two step count");
    }
    const std::size_t m = 2 * n;
    std::vector<std::complex<double>> c(m), lambda(m);
    for (std::size_t k = 0; k <= n; ++k) c[k] = increment_autocov(hurst, k);
    for (std::size_t k = n + 1; k < m; ++k) c[k] = c[m - k];
    {
      std::lock_guard lock(fftw_planner_mutex());
      impl_->plan = fftw_plan_dft_1d(static_cast<int>(m),
                                     reinterpret_cast<fftw_complex*>(c.data()),
                                     reinterpret_cast<fftw_complex*>(lambda.data()),
                                     FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_execute_dft(impl_->plan, reinterpret_cast<fftw_complex*>(c.data()),
                     reinterpret_cast<fftw_complex*>(lambda.data()));
    double max_eig = 0.0;
    for (const auto& l : lambda) max_eig = std::max(max_eig, l.real());
    bool ok = max_eig > 0.0;
    impl_->sqrt_eig.resize(m);
    const double scale = std::pow(step, hurst) / std::sqrt(static_cast<double>(m));
    for (std::size_t k = 0; k < m && ok; ++k) {
      double l = lambda[k].real();
      if (l < 0.0) {
        if (l < -kEigenTolerance * max_eig) {
          ok = false;
          break;
        }
        l = 0.0;
      }
      impl_->sqrt_eig[k] = std::sqrt(l) * scale;
    }
    if (ok) {
      impl_->m = m;
      return;
    }
    method_ = FbmMethod::cholesky;
    impl_->sqrt_eig.clear();
  }

  if (grid.size() > kMaxCholeskyPoints) {
    throw std::invalid_argument("fbm: Cholesky route limited to " +
                                std::to_string(kMaxCholeskyPoints) + " grid points");
  }
  const auto t = grid.times();
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      cov(i, j) = cov(j, i) = fbm_covariance(hurst, t[i + 1], t[j + 1]);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("fbm: covariance matrix is not positive definite");
  }
  impl_->chol = llt.matrixL();
}

FbmGenerator::~FbmGenerator() = default;
FbmGenerator::FbmGenerator(FbmGenerator&&) noexcept = default;
FbmGenerator& FbmGenerator::operator=(FbmGenerator&&) noexcept = default;

Path FbmGenerator::sample(const RngStream& rng) const { return sample_pair(rng).first; }

std::pair<Path, Path> FbmGenerator::sample_pair(const RngStream& rng) const {
  const std::size_t n = grid_.steps();
  std::vector<double> a(n + 1, 0.0), b(n + 1, 0.0);
  RandomSource src(rng);

  if (method_ == FbmMethod::circulant) {
    const std::size_t m = impl_->m;
    std::vector<std::complex<double>> z(m), y(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double re = src.normal();
      const double im = src.normal();
      z[k] = {impl_->sqrt_eig[k] * re, impl_->sqrt_eig[k] * im};
    }
    fftw_execute_dft(impl_->plan, reinterpret_cast<fftw_complex*>(z.data()),
                     reinterpret_cast<fftw_complex*>(y.data()));
    for (std::size_t i = 0; i < n; ++i) {
      a[i + 1] = a[i] + y[i].real();
      b[i + 1] = b[i] + y[i].imag();
    }
  } else {
    Eigen::VectorXd za(n), zb(n);
    for (std::size_t i = 0; i < n; ++i) za[i] = src.normal();
    for (std::size_t i = 0; i < n; ++i) zb[i] = src.normal();
    const auto lower = impl_->chol.triangularView<Eigen::Lower>();
    const Eigen::VectorXd xa = lower * za;
    const Eigen::VectorXd xb = lower * zb;
    for (std::size_t i = 0; i < n; ++i) {
      a[i + 1] = xa[i];
      b[i + 1] = xb[i];
    }
  }
  return {Path{grid_, std::move(a)}, Path{grid_, std::move(b)}};
}

Path sample_fbm(double hurst, const TimeGrid& grid, const RngStream& rng) {
  return FbmGenerator(hurst, grid).sample(rng);
}

void write_path_csv(const Path& path, std::ostream& out) {
  out << "t,value\n";
  out.precision(17);
  const auto t = path.grid.times();
  for (std::size_t i = 0; i < t.size(); ++i) out << t[i] << ',' << path.values[i] << '\n';
}

}  // namespace hitlab
