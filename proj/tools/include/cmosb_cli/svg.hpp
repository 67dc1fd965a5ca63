#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cmosb::cli {

struct NamedPoint {
  std::string name;
  double x = 0.0;
  double y = 0.0;
};

struct ScatterPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
  std::vector<NamedPoint> baselines;  // each gets its own marker shape and legend entry
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
};

// Standalone SVG documents; no timestamps, so output depends only on input.
std::string render_svg(const ScatterPlot& plot);
std::string render_svg(const LinePlot& plot);

}  // namespace cmosb::cli
