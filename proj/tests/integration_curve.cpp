#include <doctest.h>

#include <cmath>

#include "hitlab/curve.hpp"
#include "hitlab/paths.hpp"

using namespace hitlab;
using namespace hitlab::curve;

TEST_CASE("ray from the centre of a disk gives the uniform measure") {
  const Domain disk = Domain::regular_polygon(256, {0, 0}, 1.0);
  const PlanarPath ray{{{0, 0}, {2, 0}}, 0};
  const auto m = boundary_measure(ray, disk, {0, 0}, 100000, RngStream{401}, 10, 0);
  CHECK(m.hits() == 100000);
  const auto dim = entropy_dimension(m, RngStream{402});
  for (int k = 1; k <= 8; ++k) CHECK(std::abs(dim.entropy[k - 1] - k) < 0.05);
}

TEST_CASE("Brownian polyline from an off-centre root (reported)") {
  const auto grid = TimeGrid::uniform(4.0, 100000);
  const Path x = sample_bm(grid, RngStream{403}.fork(0));
  const Path y = sample_bm(grid, RngStream{403}.fork(1));
  PlanarPath c;
  for (std::size_t i = 0; i < grid.size(); ++i) c.points.push_back({x.values[i], y.values[i]});
  const Domain disk = Domain::regular_polygon(256, {0, 0}, 1.0);
  const auto m = boundary_measure(c, disk, {0.3, 0.2}, 20000, RngStream{404}, 12, 0);
  CHECK_FALSE(m.curve_too_short());
  const auto dim = entropy_dimension(m, RngStream{405});
  MESSAGE("Brownian polyline: slope " << dim.slope << " +- " << dim.half_width << " over depths 1.."
                                      << dim.stable_depth);
  CHECK(dim.slope > 0.0);
  CHECK(dim.slope <= 1.05);
}
