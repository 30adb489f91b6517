#pragma once

// Minimal single-panel SVG line charts: axes, ticks, polylines and a legend.

#include <string>
#include <vector>

namespace fgps::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  // plot log10(y); non-positive values are dropped
  std::vector<Series> series;
};

std::string render_svg(const Chart& chart);
void write_svg(const std::string& path, const Chart& chart);

}  // namespace fgps::cli
