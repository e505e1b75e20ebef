#pragma once

#include <cmath>
#include <optional>

namespace hitlab {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2, Point2) = default;
};

inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Parameters of the intersection of segments p0->p1 and q0->q1: the point is
/// p0 + t (p1 - p0) = q0 + u (q1 - q0) with t, u in [0, 1]. Collinear overlaps
/// report the smallest t on p that lies on q.
struct SegmentHit {
  double t = 0.0;
  double u = 0.0;
};

std::optional<SegmentHit> intersect_segments(Point2 p0, Point2 p1, Point2 q0, Point2 q1);

/// Distance from p to the segment a->b.
double point_segment_distance(Point2 p, Point2 a, Point2 b);

}  // namespace hitlab
