#pragma once

#include <string>
#include <vector>

namespace tbma {

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  // Error bar extents, same length as y (may be empty for no bars).
  std::vector<double> y_lo;
  std::vector<double> y_hi;
};

// Standalone SVG line chart with min/max error bars and a legend.
std::string render_line_chart(const std::vector<ChartSeries>& series,
                              const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label);

}  // namespace tbma
