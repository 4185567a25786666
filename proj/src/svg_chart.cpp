#include "tbma/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace tbma {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 190;
constexpr double kTop = 40;
constexpr double kBottom = 60;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

}  // namespace

std::string render_line_chart(const std::vector<ChartSeries>& series,
                              const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label) {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = 0.0;
  double y_max = 1.0;
  for (const auto& s : series) {
    for (double x : s.x) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
    }
    for (double y : s.y_lo) y_min = std::min(y_min, y);
    for (double y : s.y_hi) y_max = std::max(y_max, y);
  }
  if (!std::isfinite(x_min)) {
    x_min = 0.0;
    x_max = 1.0;
  }
  if (x_max == x_min) {
    x_min -= 1.0;
    x_max += 1.0;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << escape(title) << "</text>\n";

  // Axes and grid.
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
      << num(plot_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = y_min + (y_max - y_min) * i / 5.0;
    svg << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + plot_w)
        << "\" y1=\"" << num(py(y)) << "\" y2=\"" << num(py(y))
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(y) + 4)
        << "\" text-anchor=\"end\">" << tick(y) << "</text>\n";
  }
  std::vector<double> xs;
  for (const auto& s : series) xs.insert(xs.end(), s.x.begin(), s.x.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    svg << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\">" << tick(x) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 15)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  svg << "<text transform=\"translate(18," << num(kTop + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    std::ostringstream points;
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (j) points << ' ';
      points << num(px(s.x[j])) << ',' << num(py(s.y[j]));
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"" << points.str() << "\"/>\n";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      svg << "<circle cx=\"" << num(px(s.x[j])) << "\" cy=\"" << num(py(s.y[j]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      if (j < s.y_lo.size() && j < s.y_hi.size()) {
        svg << "<line x1=\"" << num(px(s.x[j])) << "\" x2=\"" << num(px(s.x[j]))
            << "\" y1=\"" << num(py(s.y_lo[j])) << "\" y2=\"" << num(py(s.y_hi[j]))
            << "\" stroke=\"" << color << "\"/>\n";
      }
    }
    const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
    svg << "<line x1=\"" << num(kWidth - kRight + 15) << "\" x2=\""
        << num(kWidth - kRight + 40) << "\" y1=\"" << num(ly) << "\" y2=\"" << num(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(kWidth - kRight + 46) << "\" y=\"" << num(ly + 4)
        << "\">" << escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace tbma
