#include "sirsvax/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sirsvax {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Roughly five ticks at 1, 2 or 5 times a power of ten.
double tick_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace

void write_svg(std::ostream& out, const LinePlot& plot) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : plot.series) {
    for (double v : s.x) { x_lo = std::min(x_lo, v); x_hi = std::max(x_hi, v); }
    for (double v : s.y) { y_lo = std::min(y_lo, v); y_hi = std::max(y_hi, v); }
  }
  if (!std::isfinite(x_lo)) { x_lo = 0.0; x_hi = 1.0; }
  if (plot.y_lo < plot.y_hi) {
    y_lo = plot.y_lo;
    y_hi = plot.y_hi;
  } else if (!std::isfinite(y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  } else {
    const double pad = y_hi > y_lo ? 0.05 * (y_hi - y_lo) : std::max(1e-3, 0.05 * std::abs(y_hi));
    y_lo -= pad;
    y_hi += pad;
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(plot.title) << "</text>\n";

  const double xs = tick_step(x_hi - x_lo);
  for (double t = std::ceil(x_lo / xs) * xs; t <= x_hi + 1e-9 * xs; t += xs) {
    out << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(px(t))
        << "\" y2=\"" << fmt(kTop + ph) << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(kTop + ph + 16)
        << "\" text-anchor=\"middle\">" << fmt(t, "%g") << "</text>\n";
  }
  const double ys = tick_step(y_hi - y_lo);
  for (double t = std::ceil(y_lo / ys) * ys; t <= y_hi + 1e-9 * ys; t += ys) {
    const double v = std::abs(t) < 1e-12 * ys ? 0.0 : t;
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(py(v)) << "\" x2=\"" << fmt(kLeft + pw)
        << "\" y2=\"" << fmt(py(v)) << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(v) + 4)
        << "\" text-anchor=\"end\">" << fmt(v, "%g") << "</text>\n";
  }
  out << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 12)
      << "\" text-anchor=\"middle\">" << escape(plot.x_label) << "</text>\n";
  out << "<text transform=\"translate(18," << fmt(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(plot.y_label) << "</text>\n";

  int row = 0;
  for (const auto& s : plot.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    // Thin long series to at most ~2000 vertices; the curves are smooth.
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
    if (s.dashed) out << " stroke-dasharray=\"6,4\"";
    out << " points=\"";
    for (std::size_t k = 0; k < n; k += stride) {
      out << fmt(px(s.x[k])) << ',' << fmt(py(std::clamp(s.y[k], y_lo, y_hi))) << ' ';
    }
    if (n > 0 && (n - 1) % stride != 0) {
      out << fmt(px(s.x[n - 1])) << ',' << fmt(py(std::clamp(s.y[n - 1], y_lo, y_hi)));
    }
    out << "\"/>\n";

    const double ly = kTop + 12 + 18 * row++;
    const double lx = kLeft + pw + 12;
    out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 26)
        << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
    if (s.dashed) out << " stroke-dasharray=\"6,4\"";
    out << "/>\n<text x=\"" << fmt(lx + 32) << "\" y=\"" << fmt(ly + 4) << "\">"
        << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_svg(const std::string& path, const LinePlot& plot) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_svg(out, plot);
}

}  // namespace sirsvax
