#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hitlab/geometry.hpp"
#include "hitlab/rng.hpp"

namespace hitlab::curve {

/// Polyline standing in for a one-sided curve; points[root_index] is the root.
struct PlanarPath {
  std::vector<Point2> points;
  std::size_t root_index = 0;

  /// At least two points, root_index in range, consecutive points distinct.
  void validate() const;
};

/// Simple closed polygon, stored counterclockwise. Arclength runs from
/// vertex 0 along the stored orientation.
class Domain {
 public:
  /// Throws on fewer than 3 vertices, repeated consecutive vertices or
  /// self-intersections. Clockwise input is reversed. A trailing vertex equal
  /// to the first is dropped.
  explicit Domain(std::vector<Point2> boundary);

  /// Regular n-gon inscribed in the circle of `radius`, vertex 0 at angle 0.
  static Domain regular_polygon(std::size_t n, Point2 center, double radius);

  [[nodiscard]] const std::vector<Point2>& boundary() const { return vertices_; }
  [[nodiscard]] double perimeter() const { return cumulative_.back(); }
  /// Arclength at the start of edge i (vertex i).
  [[nodiscard]] double arclength_at_vertex(std::size_t i) const { return cumulative_[i]; }

  /// Strict interior test (points on the boundary are outside).
  [[nodiscard]] bool contains(Point2 p) const;
  [[nodiscard]] double distance_to_boundary(Point2 p) const;
  [[nodiscard]] Point2 point_at(double arclength) const;

  struct EdgeHit {
    std::size_t edge;
    double t;  // parameter along the query segment
    double u;  // parameter along the edge
  };
  /// First intersection of segment a->b with the boundary (smallest t).
  [[nodiscard]] std::optional<EdgeHit> first_intersection(Point2 a, Point2 b) const;

 private:
  std::vector<Point2> vertices_;
  std::vector<double> cumulative_;  // size n + 1
};

/// Rigid motion taking the curve's root to `root`, then rotating by theta
/// about it.
PlanarPath reroot_rotate(const PlanarPath& curve, Point2 root, double theta);

struct BoundaryHit {
  Point2 point;
  double arclength = 0.0;
  /// Index i of the curve segment points[i] -> points[i+1] that hits.
  std::size_t segment = 0;
};

/// Walks the curve from its root outward and returns the first boundary
/// crossing. The root must be strictly inside the domain.
std::optional<BoundaryHit> first_boundary_hit(const PlanarPath& curve, const Domain& dom);

/// Dyadic histogram of hit positions on the boundary.
///
/// Positions are arclength / perimeter in [0, 1). Depth d has 2^d bins; bins
/// at depth d+1 refine those at depth d exactly since both are counts of the
/// same positions.
struct BoundaryMeasure {
  static constexpr int kMaxDepth = 22;

  int d_max = 0;
  std::size_t samples = 0;
  std::vector<double> positions;
  std::vector<std::vector<std::size_t>> counts;  // counts[d - 1], d = 1..d_max

  static BoundaryMeasure from_positions(std::vector<double> positions, std::size_t samples,
                                        int d_max);

  [[nodiscard]] std::size_t hits() const { return positions.size(); }
  [[nodiscard]] double hit_fraction() const;
  /// Fewer than half of the sampled rotations reached the boundary.
  [[nodiscard]] bool curve_too_short() const { return hit_fraction() < 0.5; }
  [[nodiscard]] std::vector<double> masses(int depth) const;
};

/// Rotates the curve (rooted at `root`) by uniform random angles and bins
/// the first boundary hits.
BoundaryMeasure boundary_measure(const PlanarPath& curve, const Domain& dom, Point2 root,
                                 std::size_t angle_samples, const RngStream& rng, int d_max,
                                 unsigned workers = 1);

struct EntropyDimension {
  /// Base-2 entropy at depths 1..d_max.
  std::vector<double> entropy;
  /// Largest depth whose non-empty bins hold >= 10 hits on average.
  int stable_depth = 0;
  double slope = 0.0;
  double half_width = 0.0;
};

/// Information-dimension estimate: slope of entropy against depth over the
/// stable depths 1..stable_depth, with a bootstrap half-width from
/// resampling hit positions. Needs >= 1000 hits and >= 2 stable depths.
EntropyDimension entropy_dimension(const BoundaryMeasure& measure, const RngStream& rng);

/// Reads "x,y" rows; a non-numeric first line is taken as a header.
std::vector<Point2> read_points_csv(std::istream& in);

/// "depth,bin,mass" rows.
void write_measure_csv(const BoundaryMeasure& m, std::ostream& out);

}  // namespace hitlab::curve
