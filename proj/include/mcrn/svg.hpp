#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcrn {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 720;
  int height = 440;
};

/// Minimal standalone SVG line chart. Non-positive values are dropped on a log axis.
void write_svg_chart(std::ostream& out, const std::vector<Series>& series, const ChartOptions& opt);

}  // namespace mcrn
