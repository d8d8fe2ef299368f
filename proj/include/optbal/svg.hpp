#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "optbal/errors.hpp"

namespace optbal {

/// Static scatter-plus-line plot written directly as SVG: axes, tick labels,
/// data markers, and an optional fitted line.  Callers transform to log or
/// cube-root coordinates before handing the points over.
struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
  bool has_line = false;
  double line_slope = 0.0;
  double line_intercept = 0.0;
};

namespace detail {

inline std::string svg_num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

}  // namespace detail

inline void write_svg_plot(const SvgPlot& plot, std::ostream& out) {
  if (plot.points.empty()) throw Error("svg plot: no points");
  const double width = 640, height = 480;
  const double ml = 70, mr = 20, mt = 40, mb = 55;

  double x0 = plot.points[0].first, x1 = x0, y0 = plot.points[0].second, y1 = y0;
  for (const auto& [x, y] : plot.points) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  const double padx = 0.05 * (x1 - x0), pady = 0.08 * (y1 - y0);
  x0 -= padx;
  x1 += padx;
  y0 -= pady;
  y1 += pady;

  const auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (width - ml - mr); };
  const auto py = [&](double y) { return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << plot.title << "</text>\n";

  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double tx = x0 + (x1 - x0) * i / ticks;
    const double ty = y0 + (y1 - y0) * i / ticks;
    out << "<line x1=\"" << px(tx) << "\" y1=\"" << height - mb << "\" x2=\"" << px(tx)
        << "\" y2=\"" << height - mb + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(tx) << "\" y=\"" << height - mb + 20
        << "\" text-anchor=\"middle\" font-size=\"11\">" << detail::svg_num(tx) << "</text>\n";
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(ty) << "\" x2=\"" << ml << "\" y2=\""
        << py(ty) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py(ty) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << detail::svg_num(ty) << "</text>\n";
  }
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << plot.x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << (mt + height - mb) / 2 << ")\">" << plot.y_label << "</text>\n";

  if (plot.has_line) {
    const double ya = plot.line_slope * x0 + plot.line_intercept;
    const double yb = plot.line_slope * x1 + plot.line_intercept;
    out << "<line x1=\"" << px(x0) << "\" y1=\"" << py(ya) << "\" x2=\"" << px(x1) << "\" y2=\""
        << py(yb) << "\" stroke=\"#c0392b\" stroke-dasharray=\"6 3\"/>\n";
  }

  // data polyline + markers
  out << "<polyline fill=\"none\" stroke=\"#2962a8\" stroke-width=\"1.5\" points=\"";
  for (const auto& [x, y] : plot.points) out << px(x) << ',' << py(y) << ' ';
  out << "\"/>\n";
  for (const auto& [x, y] : plot.points)
    out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3.5\" fill=\"#2962a8\"/>\n";
  out << "</svg>\n";
}

inline void write_svg_file(const SvgPlot& plot, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write svg file \"" + path + "\"");
  write_svg_plot(plot, out);
}

}  // namespace optbal
