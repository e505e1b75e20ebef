#include "hitlab/geometry.hpp"

#include <algorithm>

namespace hitlab {

std::optional<SegmentHit> intersect_segments(Point2 p0, Point2 p1, Point2 q0, Point2 q1) {
  const Point2 r = p1 - p0;
  const Point2 s = q1 - q0;
  const Point2 qp = q0 - p0;
  const double denom = cross(r, s);
  const double scale = norm(r) * norm(s);
  if (scale == 0.0) return std::nullopt;

  if (std::abs(denom) <= 1e-14 * scale) {
    // Parallel: only collinear overlaps intersect.
    if (std::abs(cross(qp, r)) > 1e-14 * norm(qp) * norm(r) + 1e-300) return std::nullopt;
    const double rr = dot(r, r);
    double t0 = dot(qp, r) / rr;
    double t1 = t0 + dot(s, r) / rr;
    if (t0 > t1) std::swap(t0, t1);
    if (t1 < 0.0 || t0 > 1.0) return std::nullopt;
    const double t = std::max(t0, 0.0);
    const Point2 at = p0 + t * r;
    const double ss = dot(s, s);
    return SegmentHit{t, std::clamp(dot(at - q0, s) / ss, 0.0, 1.0)};
  }

  const double t = cross(qp, s) / denom;
  const double u = cross(qp, r) / denom;
  constexpr double eps = 1e-12;
  if (t < -eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps) return std::nullopt;
  return SegmentHit{std::clamp(t, 0.0, 1.0), std::clamp(u, 0.0, 1.0)};
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

}  // namespace hitlab
