#include "hitlab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hitlab/parallel.hpp"
#include "hitlab/stats.hpp"

namespace hitlab::curve {

void PlanarPath::validate() const {
  if (points.size() < 2) throw std::invalid_argument("curve needs at least 2 points");
  if (root_index >= points.size()) throw std::invalid_argument("curve root_index out of range");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i] == points[i - 1]) {
      throw std::invalid_argument("curve has repeated consecutive point at index " +
                                  std::to_string(i));
    }
  }
}

// ------------------------------------------------------------------ Domain

Domain::Domain(std::vector<Point2> boundary) : vertices_(std::move(boundary)) {
  if (vertices_.size() > 1 && vertices_.front() == vertices_.back()) vertices_.pop_back();
  const std::size_t n = vertices_.size();
  if (n < 3) throw std::invalid_argument("domain boundary needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    if (vertices_[i] == vertices_[(i + 1) % n]) {
      throw std::invalid_argument("domain boundary has repeated vertex at index " +
                                  std::to_string(i));
    }
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) area2 += cross(vertices_[i], vertices_[(i + 1) % n]);
  if (area2 == 0.0) throw std::invalid_argument("domain boundary has zero area");
  if (area2 < 0.0) std::reverse(vertices_.begin(), vertices_.end());

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (intersect_segments(vertices_[i], vertices_[(i + 1) % n], vertices_[j],
                             vertices_[(j + 1) % n])) {
        throw std::invalid_argument("domain boundary is not simple (edges " + std::to_string(i) +
                                    " and " + std::to_string(j) + " intersect)");
      }
    }
  }
  cumulative_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cumulative_[i + 1] = cumulative_[i] + distance(vertices_[i], vertices_[(i + 1) % n]);
  }
}

Domain Domain::regular_polygon(std::size_t n, Point2 center, double radius) {
  if (n < 3) throw std::invalid_argument("regular_polygon: need at least 3 vertices");
  if (!(radius > 0.0)) throw std::invalid_argument("regular_polygon: radius must be positive");
  std::vector<Point2> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    v[k] = {center.x + radius * std::cos(a), center.y + radius * std::sin(a)};
  }
  return Domain(std::move(v));
}

bool Domain::contains(Point2 p) const {
  const std::size_t n = vertices_.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = vertices_[i];
    const Point2 b = vertices_[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside && distance_to_boundary(p) > 0.0;
}

double Domain::distance_to_boundary(Point2 p) const {
  const std::size_t n = vertices_.size();
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    d = std::min(d, point_segment_distance(p, vertices_[i], vertices_[(i + 1) % n]));
  }
  return d;
}

Point2 Domain::point_at(double s) const {
  const double per = perimeter();
  s = std::fmod(s, per);
  if (s < 0.0) s += per;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()) - 1,
                                              vertices_.size() - 1);
  const Point2 a = vertices_[i];
  const Point2 b = vertices_[(i + 1) % vertices_.size()];
  const double len = cumulative_[i + 1] - cumulative_[i];
  return a + ((s - cumulative_[i]) / len) * (b - a);
}

std::optional<Domain::EdgeHit> Domain::first_intersection(Point2 a, Point2 b) const {
  const std::size_t n = vertices_.size();
  std::optional<EdgeHit> best;
  for (std::size_t i = 0; i < n; ++i) {
    if (auto h = intersect_segments(a, b, vertices_[i], vertices_[(i + 1) % n])) {
      if (!best || h->t < best->t) best = EdgeHit{i, h->t, h->u};
    }
  }
  return best;
}

// ------------------------------------------------------------------- walks

PlanarPath reroot_rotate(const PlanarPath& curve, Point2 root, double theta) {
  curve.validate();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Point2 origin = curve.points[curve.root_index];
  PlanarPath out;
  out.root_index = curve.root_index;
  out.points.reserve(curve.points.size());
  for (const Point2& p : curve.points) {
    const Point2 d = p - origin;
    out.points.push_back({root.x + c * d.x - s * d.y, root.y + s * d.x + c * d.y});
  }
  return out;
}

namespace {

std::vector<double> prefix_arclength(const std::vector<Point2>& pts) {
  std::vector<double> arc(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) arc[i] = arc[i - 1] + distance(pts[i - 1], pts[i]);
  return arc;
}

// Walks from the root. Everything within arclength d of a point at distance
// d from the boundary stays inside, so those segments are skipped without
// intersection tests.
template <class PointAt>
std::optional<BoundaryHit> walk_first_hit(std::size_t n, std::size_t root, const std::vector<double>& arc,
                                          const Domain& dom, PointAt&& point_at) {
  std::size_t i = root;
  while (i + 1 < n) {
    const Point2 p = point_at(i);
    const double d = dom.distance_to_boundary(p);
    const auto it = std::lower_bound(arc.begin() + static_cast<std::ptrdiff_t>(i) + 1, arc.end(), arc[i] + d);
    const auto m = static_cast<std::size_t>(it - arc.begin()) - 1;
    if (d > 0.0 && m > i) {
      i = m;
      continue;
    }
    const Point2 q = point_at(i + 1);
    if (auto h = dom.first_intersection(p, q)) {
      BoundaryHit hit;
      hit.point = p + h->t * (q - p);
      const auto& v = dom.boundary();
      const double edge_len = distance(v[h->edge], v[(h->edge + 1) % v.size()]);
      hit.arclength = dom.arclength_at_vertex(h->edge) + h->u * edge_len;
      if (hit.arclength >= dom.perimeter()) hit.arclength -= dom.perimeter();
      hit.segment = i;
      return hit;
    }
    ++i;
  }
  return std::nullopt;
}

void require_strictly_inside(const Domain& dom, Point2 p) {
  if (!dom.contains(p)) {
    throw std::invalid_argument("curve root must lie strictly inside the domain");
  }
}

}  // namespace

std::optional<BoundaryHit> first_boundary_hit(const PlanarPath& curve, const Domain& dom) {
  curve.validate();
  require_strictly_inside(dom, curve.points[curve.root_index]);
  const auto arc = prefix_arclength(curve.points);
  return walk_first_hit(curve.points.size(), curve.root_index, arc, dom,
                        [&](std::size_t i) { return curve.points[i]; });
}

// ------------------------------------------------------- boundary measure

BoundaryMeasure BoundaryMeasure::from_positions(std::vector<double> positions, std::size_t samples,
                                                int d_max) {
  if (d_max < 1 || d_max > kMaxDepth) {
    throw std::invalid_argument("d_max must lie in [1, " + std::to_string(kMaxDepth) + "]");
  }
  BoundaryMeasure m;
  m.d_max = d_max;
  m.samples = samples;
  m.positions = std::move(positions);
  const std::size_t finest = std::size_t{1} << d_max;
  std::vector<std::size_t> fine(finest, 0);
  for (double u : m.positions) {
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("positions must lie in [0, 1)");
    ++fine[std::min(static_cast<std::size_t>(u * static_cast<double>(finest)), finest - 1)];
  }
  m.counts.resize(static_cast<std::size_t>(d_max));
  m.counts.back() = std::move(fine);
  for (int d = d_max - 1; d >= 1; --d) {
    const auto& child = m.counts[static_cast<std::size_t>(d)];
    auto& parent = m.counts[static_cast<std::size_t>(d - 1)];
    parent.assign(std::size_t{1} << d, 0);
    for (std::size_t b = 0; b < parent.size(); ++b) parent[b] = child[2 * b] + child[2 * b + 1];
  }
  return m;
}

double BoundaryMeasure::hit_fraction() const {
  return samples == 0 ? 0.0 : static_cast<double>(hits()) / static_cast<double>(samples);
}

std::vector<double> BoundaryMeasure::masses(int depth) const {
  if (depth < 1 || depth > d_max) throw std::out_of_range("BoundaryMeasure: depth out of range");
  const auto& c = counts[static_cast<std::size_t>(depth - 1)];
  std::vector<double> out(c.size(), 0.0);
  if (hits() == 0) return out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    out[i] = static_cast<double>(c[i]) / static_cast<double>(hits());
  }
  return out;
}

BoundaryMeasure boundary_measure(const PlanarPath& curve, const Domain& dom, Point2 root,
                                 std::size_t angle_samples, const RngStream& rng, int d_max,
                                 unsigned workers) {
  curve.validate();
  require_strictly_inside(dom, root);
  const auto arc = prefix_arclength(curve.points);
  const Point2 origin = curve.points[curve.root_index];
  std::vector<double> pos(angle_samples, -1.0);
  parallel_for(angle_samples, workers, [&](std::size_t k) {
    RandomSource src(rng.replicate(k));
    const double theta = 2.0 * std::numbers::pi * src.uniform();
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    auto point_at = [&](std::size_t i) {
      const Point2 d = curve.points[i] - origin;
      return Point2{root.x + c * d.x - s * d.y, root.y + s * d.x + c * d.y};
    };
    if (auto h = walk_first_hit(curve.points.size(), curve.root_index, arc, dom, point_at)) {
      pos[k] = std::min(h->arclength / dom.perimeter(), std::nextafter(1.0, 0.0));
    }
  });
  std::vector<double> hits;
  hits.reserve(angle_samples);
  for (double u : pos) {
    if (u >= 0.0) hits.push_back(u);
  }
  return BoundaryMeasure::from_positions(std::move(hits), angle_samples, d_max);
}

// ----------------------------------------------------- entropy dimension

namespace {

std::vector<double> entropies(std::span<const double> positions, int depth_limit) {
  const std::size_t finest = std::size_t{1} << depth_limit;
  std::vector<std::size_t> counts(finest, 0);
  for (double u : positions) {
    ++counts[std::min(static_cast<std::size_t>(u * static_cast<double>(finest)), finest - 1)];
  }
  std::vector<double> h(static_cast<std::size_t>(depth_limit));
  for (int d = depth_limit; d >= 1; --d) {
    h[static_cast<std::size_t>(d - 1)] = stats::entropy_from_counts(counts);
    std::vector<std::size_t> parent(counts.size() / 2);
    for (std::size_t b = 0; b < parent.size(); ++b) parent[b] = counts[2 * b] + counts[2 * b + 1];
    counts = std::move(parent);
  }
  return h;
}

double slope_over(std::span<const double> h, int depth_limit) {
  std::vector<double> x, y;
  for (int d = 1; d <= depth_limit; ++d) {
    x.push_back(d);
    y.push_back(h[static_cast<std::size_t>(d - 1)]);
  }
  return stats::ols_fit(x, y).slope;
}

}  // namespace

EntropyDimension entropy_dimension(const BoundaryMeasure& measure, const RngStream& rng) {
  if (measure.hits() < 1000) {
    throw std::invalid_argument("entropy_dimension: need at least 1000 hits (got " +
                                std::to_string(measure.hits()) + ")");
  }
  EntropyDimension out;
  for (int d = 1; d <= measure.d_max; ++d) {
    const auto& c = measure.counts[static_cast<std::size_t>(d - 1)];
    out.entropy.push_back(stats::entropy_from_counts(c));
    const auto occupied = static_cast<double>(std::count_if(c.begin(), c.end(), [](std::size_t v) { return v > 0; }));
    if (static_cast<double>(measure.hits()) / occupied >= 10.0 && out.stable_depth == d - 1) {
      out.stable_depth = d;
    }
  }
  if (out.stable_depth < 2) throw std::invalid_argument("entropy_dimension: no stable depth range");
  const int depth = out.stable_depth;
  out.slope = slope_over(out.entropy, depth);
  out.half_width = stats::bootstrap_half_width(
      measure.positions,
      [depth](std::span<const double> sample) { return slope_over(entropies(sample, depth), depth); },
      rng);
  return out;
}

// ---------------------------------------------------------------------- IO

std::vector<Point2> read_points_csv(std::istream& in) {
  std::vector<Point2> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    Point2 p;
    if (!(ss >> p.x >> p.y)) {
      if (pts.empty() && lineno == 1) continue;  // header
      throw std::invalid_argument("points csv: cannot parse line " + std::to_string(lineno));
    }
    pts.push_back(p);
  }
  return pts;
}

void write_measure_csv(const BoundaryMeasure& m, std::ostream& out) {
  out << "depth,bin,mass\n";
  out.precision(17);
  for (int d = 1; d <= m.d_max; ++d) {
    const auto mass = m.masses(d);
    for (std::size_t b = 0; b < mass.size(); ++b) out << d << ',' << b << ',' << mass[b] << '\n';
  }
}

}  // namespace hitlab::curve
