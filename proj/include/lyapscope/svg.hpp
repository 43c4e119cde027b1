#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lyapscope/csv.hpp"

namespace lyap {

struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// Minimal self-emitted line chart (no external drawing dependency).
inline std::string svg_line_chart(const std::vector<SvgSeries>& series, const std::string& title,
                                  int width = 640, int height = 400) {
  const double ml = 60, mr = 20, mt = 40, mb = 40;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!(xmin <= xmax)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) ymax = ymin + 1;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

  const char* colors[] = {"#1f6fb2", "#c23b22", "#2e8b57", "#8856a7", "#c28f22"};
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + std::to_string(width / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"monospace\" font-size=\"14\">" + title + "</text>\n";
  out += "<rect x=\"" + fmt_double(ml) + "\" y=\"" + fmt_double(mt) + "\" width=\"" +
         fmt_double(width - ml - mr) + "\" height=\"" + fmt_double(height - mt - mb) +
         "\" fill=\"none\" stroke=\"#555\"/>\n";
  for (const auto& lbl :
       {std::pair<double, const char*>{xmin, "start"}, {xmax, "end"}}) {
    out += "<text x=\"" + fmt_double(px(lbl.first)) + "\" y=\"" + fmt_double(height - mb + 16.0) +
           "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">" +
           fmt_double(lbl.first) + "</text>\n";
  }
  for (double yv : {ymin, ymax}) {
    out += "<text x=\"" + fmt_double(ml - 6.0) + "\" y=\"" + fmt_double(py(yv) + 4.0) +
           "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" + fmt_double(yv) +
           "</text>\n";
  }
  int ci = 0;
  for (const auto& s : series) {
    std::string pts;
    for (const auto& [x, y] : s.points) pts += fmt_double(px(x)) + "," + fmt_double(py(y)) + " ";
    out += "<polyline fill=\"none\" stroke=\"" + std::string(colors[ci % 5]) +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    out += "<text x=\"" + fmt_double(width - mr - 4.0) + "\" y=\"" +
           std::to_string(mt + 16 + 14 * ci) +
           "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" fill=\"" +
           colors[ci % 5] + "\">" + s.name + "</text>\n";
    ++ci;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace lyap
