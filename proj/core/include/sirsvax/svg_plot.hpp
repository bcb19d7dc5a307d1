#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sirsvax {

struct PlotSeries {
  std::string label;
  std::string color = "#000000";
  bool dashed = false;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  /// Fixed y range; when lo >= hi the range is taken from the data.
  double y_lo = 0.0;
  double y_hi = 0.0;
};

/// Static SVG line chart with axes, ticks and a legend.
void write_svg(std::ostream& out, const LinePlot& plot);
void write_svg(const std::string& path, const LinePlot& plot);

}  // namespace sirsvax
