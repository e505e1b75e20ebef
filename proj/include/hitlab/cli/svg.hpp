#pragma once

#include <span>
#include <string>
#include <vector>

namespace hitlab::cli::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool line = true;
  bool markers = true;
  /// Palette index; -1 picks the series position.
  int colour = -1;
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Standalone SVG document with one polyline/marker set per series and a
/// legend. Non-positive values are dropped on log axes.
std::string line_chart(const Axes& axes, std::span<const Series> series);

/// Histogram with bins [edges[i], edges[i+1]).
std::string histogram(const Axes& axes, std::span<const double> edges, std::span<const double> heights);

struct Segment {
  double x0, y0, x1, y1;
};

struct Marker {
  double x, y, value;
};

/// Gray line work with markers coloured by value on a sequential scale.
std::string heat_map(const std::string& title, std::span<const Segment> lines,
                     std::span<const Marker> markers);

}  // namespace hitlab::cli::svg
