#include "hitlab/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace hitlab::cli::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 55;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Scale {
  double lo, hi, px0, px1;
  bool log;
  [[nodiscard]] double operator()(double v) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double t = ((log ? std::log10(v) : v) - a) / (b - a);
    return px0 + t * (px1 - px0);
  }
  [[nodiscard]] std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::floor(std::log10(lo)); e <= std::ceil(std::log10(hi)); e += 1.0) {
        for (double m : {1.0, 2.0, 5.0}) {
          const double v = m * std::pow(10.0, e);
          if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) out.push_back(v);
        }
      }
      return out;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
      out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
  }
};

Scale make_scale(double lo, double hi, double px0, double px1, bool log) {
  if (!(lo < hi)) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  } else if (!log) {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  } else {
    lo /= 1.2;
    hi *= 1.2;
  }
  return {lo, hi, px0, px1, log};
}

void open_doc(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(title)
     << "</text>\n";
}

void draw_axes(std::ostringstream& os, const Axes& axes, const Scale& sx, const Scale& sy) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  os << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : sx.ticks()) {
    const double px = sx(t);
    os << "<line x1=\"" << num(px) << "\" y1=\"" << y0 << "\" x2=\"" << num(px) << "\" y2=\"" << y0 + 5
       << "\" stroke=\"black\"/>\n<text x=\"" << num(px) << "\" y=\"" << y0 + 18
       << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : sy.ticks()) {
    const double py = sy(t);
    os << "<line x1=\"" << x0 - 5 << "\" y1=\"" << num(py) << "\" x2=\"" << x0 << "\" y2=\"" << num(py)
       << "\" stroke=\"black\"/>\n<text x=\"" << x0 - 8 << "\" y=\"" << num(py + 4)
       << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
     << esc(axes.x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << (y0 + y1) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << esc(axes.y_label) << "</text>\n";
}

bool usable(double x, double y, const Axes& axes) {
  if (!std::isfinite(x) || !std::isfinite(y)) return false;
  if (axes.log_x && !(x > 0)) return false;
  if (axes.log_y && !(y > 0)) return false;
  return true;
}

}  // namespace

std::string line_chart(const Axes& axes, std::span<const Series> series) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i], axes)) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  if (!std::isfinite(xlo)) {
    xlo = ylo = axes.log_x ? 1.0 : 0.0;
    xhi = yhi = axes.log_x ? 10.0 : 1.0;
  }
  const Scale sx = make_scale(xlo, xhi, kLeft, kWidth - kRight, axes.log_x);
  const Scale sy = make_scale(ylo, yhi, kHeight - kBottom, kTop, axes.log_y);

  std::ostringstream os;
  open_doc(os, axes.title);
  draw_axes(os, axes, sx, sy);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::size_t ci = s.colour >= 0 ? static_cast<std::size_t>(s.colour) : k;
    const char* colour = kPalette[ci % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (usable(s.x[i], s.y[i], axes)) pts.emplace_back(sx(s.x[i]), sy(s.y[i]));
    }
    if (s.line && pts.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (auto [px, py] : pts) os << num(px) << ',' << num(py) << ' ';
      os << "\"/>\n";
    }
    if (s.markers) {
      for (auto [px, py] : pts) {
        os << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
      }
    }
    const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
    const double lx = kWidth - kRight + 12;
    if (s.line) {
      os << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 18 << "\" y2=\"" << ly
         << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    } else {
      os << "<circle cx=\"" << lx + 9 << "\" cy=\"" << ly << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
    }
    os << "<text x=\"" << lx + 24 << "\" y=\"" << ly + 4 << "\">" << esc(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string histogram(const Axes& axes, std::span<const double> edges, std::span<const double> heights) {
  const std::size_t n = std::min(heights.size(), edges.empty() ? 0 : edges.size() - 1);
  double yhi = 0.0;
  for (std::size_t i = 0; i < n; ++i) yhi = std::max(yhi, heights[i]);
  const double xlo = n ? edges.front() : 0.0;
  const double xhi = n ? edges[n] : 1.0;
  const Scale sx{xlo, xhi > xlo ? xhi : xlo + 1.0, kLeft, kWidth - kRight, false};
  const Scale sy{0.0, yhi > 0 ? yhi * 1.05 : 1.0, kHeight - kBottom, kTop, false};

  std::ostringstream os;
  open_doc(os, axes.title);
  draw_axes(os, axes, sx, sy);
  for (std::size_t i = 0; i < n; ++i) {
    const double px0 = sx(edges[i]);
    const double px1 = sx(edges[i + 1]);
    const double py = sy(heights[i]);
    os << "<rect x=\"" << num(px0) << "\" y=\"" << num(py) << "\" width=\"" << num(std::max(px1 - px0, 0.5))
       << "\" height=\"" << num(sy(0.0) - py) << "\" fill=\"" << kPalette[0] << "\" stroke=\"white\" stroke-width=\"0.3\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string heat_map(const std::string& title, std::span<const Segment> lines,
                     std::span<const Marker> markers) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  auto grow = [&](double x, double y) {
    xlo = std::min(xlo, x);
    xhi = std::max(xhi, x);
    ylo = std::min(ylo, y);
    yhi = std::max(yhi, y);
  };
  for (const auto& s : lines) {
    grow(s.x0, s.y0);
    grow(s.x1, s.y1);
  }
  for (const auto& m : markers) grow(m.x, m.y);
  if (!std::isfinite(xlo)) xlo = ylo = 0, xhi = yhi = 1;
  const double span = std::max({xhi - xlo, yhi - ylo, 1e-12});
  const double size = std::min(kWidth - kLeft - kRight, kHeight - kTop - kBottom);
  auto px = [&](double x) { return kLeft + (x - xlo) / span * size; };
  auto py = [&](double y) { return kHeight - kBottom - (y - ylo) / span * size; };

  double vmax = 0.0;
  for (const auto& m : markers) vmax = std::max(vmax, m.value);

  std::ostringstream os;
  open_doc(os, title);
  const double stroke = std::max(0.2, std::min(1.0, 40.0 / std::sqrt(static_cast<double>(lines.size()) + 1.0)));
  for (const auto& s : lines) {
    os << "<line x1=\"" << num(px(s.x0)) << "\" y1=\"" << num(py(s.y0)) << "\" x2=\"" << num(px(s.x1))
       << "\" y2=\"" << num(py(s.y1)) << "\" stroke=\"#bbbbbb\" stroke-width=\"" << num(stroke) << "\"/>\n";
  }
  auto colour = [&](double v) {
    // White to dark red.
    const double t = vmax > 0 ? std::clamp(v / vmax, 0.0, 1.0) : 0.0;
    const int r = static_cast<int>(255 - 100 * t);
    const int g = static_cast<int>(245 * (1 - t));
    const int b = static_cast<int>(235 * (1 - t));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };
  const double radius = std::clamp(size / (3.0 * std::sqrt(static_cast<double>(markers.size()) + 1.0)), 1.5, 8.0);
  for (const auto& m : markers) {
    os << "<circle cx=\"" << num(px(m.x)) << "\" cy=\"" << num(py(m.y)) << "\" r=\"" << num(radius)
       << "\" fill=\"" << colour(m.value) << "\" stroke=\"black\" stroke-width=\"0.3\"/>\n";
  }
  // Colour bar.
  const double bx = kWidth - kRight + 30, by = kTop + 10, bh = 200;
  for (int i = 0; i < 20; ++i) {
    os << "<rect x=\"" << bx << "\" y=\"" << num(by + bh * (19 - i) / 20.0) << "\" width=\"16\" height=\""
       << num(bh / 20.0 + 0.5) << "\" fill=\"" << colour(vmax * (i + 0.5) / 20.0) << "\"/>\n";
  }
  os << "<text x=\"" << bx + 22 << "\" y=\"" << by + 8 << "\">" << tick_label(vmax) << "</text>\n"
     << "<text x=\"" << bx + 22 << "\" y=\"" << by + bh << "\">0</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace hitlab::cli::svg
