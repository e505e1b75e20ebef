#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "hitlab/rng.hpp"

namespace hitlab {

/// Strictly increasing sample times starting at 0.
///
/// Copies share the underlying storage, so many paths on one grid cost one
/// time vector.
class TimeGrid {
 public:
  /// `steps` equal steps on [0, horizon].
  static TimeGrid uniform(double horizon, std::size_t steps);

  /// 0 followed by smallest, smallest/ratio, ... up to and including `largest`
  /// (ratio in (0,1)). Useful when only a few scales matter.
  static TimeGrid geometric(double smallest, double largest, double ratio);

  /// Arbitrary times; validated.
  static TimeGrid from_times(std::vector<double> times);

  [[nodiscard]] std::span<const double> times() const { return *times_; }
  [[nodiscard]] std::size_t size() const { return times_->size(); }
  [[nodiscard]] std::size_t steps() const { return times_->size() - 1; }
  [[nodiscard]] double horizon() const { return times_->back(); }
  [[nodiscard]] double operator[](std::size_t i) const { return (*times_)[i]; }

  [[nodiscard]] bool is_uniform() const { return uniform_; }
  /// Constant step of a uniform grid; smallest step otherwise.
  [[nodiscard]] double step() const { return min_step_; }

  [[nodiscard]] bool same_as(const TimeGrid& other) const;

 private:
  explicit TimeGrid(std::vector<double> times, bool uniform);

  std::shared_ptr<const std::vector<double>> times_;
  bool uniform_ = false;
  double min_step_ = 0.0;
};

struct Path {
  TimeGrid grid;
  std::vector<double> values;

  /// Linear interpolation inside the grid; throws outside [0, horizon].
  [[nodiscard]] double at(double t) const;
};

/// Standard Brownian motion, exact in law at the grid points.
Path sample_bm(const TimeGrid& grid, const RngStream& rng);

/// Bessel(3) from 0: the norm of three independent Brownian motions.
Path sample_bes3(const TimeGrid& grid, const RngStream& rng);

/// alpha * BES(3) + sqrt(1 - alpha^2) * BM with independent components.
/// Requires |alpha| < 1.
Path sample_mixture(double alpha, const TimeGrid& grid, const RngStream& rng);

/// Fractional Brownian motion on a uniform grid with a power-of-two step
/// count. Circulant embedding with dense Cholesky fallback; see FbmGenerator.
Path sample_fbm(double hurst, const TimeGrid& grid, const RngStream& rng);

/// Covariance of fBM values, 0.5 (s^2H + t^2H - |t - s|^2H).
double fbm_covariance(double hurst, double s, double t);

enum class FbmMethod { circulant, cholesky };

/// Reusable fBM sampler for one (hurst, grid) pair.
///
/// The circulant route embeds the increment autocovariance into a circulant
/// matrix of size 2N and diagonalizes it with an FFT; eigenvalues down to
/// -1e-10 x (largest eigenvalue) are clamped to 0, anything more negative
/// switches to Cholesky of the value covariance. The Cholesky route accepts
/// any uniform grid with at most kMaxCholeskyPoints points.
class FbmGenerator {
 public:
  static constexpr std::size_t kMaxCholeskyPoints = std::size_t{1} << 13;
  static constexpr double kEigenTolerance = 1e-10;

  FbmGenerator(double hurst, const TimeGrid& grid,
               FbmMethod preferred = FbmMethod::circulant);
  ~FbmGenerator();
  FbmGenerator(FbmGenerator&&) noexcept;
  FbmGenerator& operator=(FbmGenerator&&) noexcept;

  [[nodiscard]] FbmMethod method() const { return method_; }
  [[nodiscard]] double hurst() const { return hurst_; }
  [[nodiscard]] const TimeGrid& grid() const { return grid_; }

  [[nodiscard]] Path sample(const RngStream& rng) const;

  /// Two independent paths. On the circulant route both come from a single
  /// complex FFT (real and imaginary parts).
  [[nodiscard]] std::pair<Path, Path> sample_pair(const RngStream& rng) const;

 private:
  struct Impl;

  double hurst_;
  TimeGrid grid_;
  FbmMethod method_;
  std::unique_ptr<Impl> impl_;
};

/// Writes "t,value" rows.
void write_path_csv(const Path& path, std::ostream& out);

}  // namespace hitlab
