// Copyright 2026 The qbrown developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qbrown::io {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<double>& x,
                     const std::vector<SvgSeries>& series) {
  if (x.size() < 2) throw std::invalid_argument("write_svg_lines: need >= 2 points");
  const double W = 900, H = 560;
  const double L = 80, R = 30, T = 50, B = 60;  // margins

  double xmin = x.front(), xmax = x.back();
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -ymin;
  for (const auto& s : series) {
    if (s.y.size() != x.size())
      throw std::invalid_argument("write_svg_lines: series length mismatch");
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!(ymax > ymin)) {
    ymax = ymin + 1.0;
    ymin -= 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  auto px = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " "
     << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" "
        "font-family=\"monospace\" font-size=\"16\">"
     << title << "</text>\n";

  // axes
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R
     << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\""
     << H - B << "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    os << "<line x1=\"" << coord(px(xv)) << "\" y1=\"" << H - B << "\" x2=\""
       << coord(px(xv)) << "\" y2=\"" << H - B + 6 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << coord(px(xv)) << "\" y=\"" << H - B + 22
       << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">"
       << tick_label(xv) << "</text>\n";
    os << "<line x1=\"" << L - 6 << "\" y1=\"" << coord(py(yv)) << "\" x2=\"" << L
       << "\" y2=\"" << coord(py(yv)) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << L - 10 << "\" y=\"" << coord(py(yv) + 4)
       << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\">"
       << tick_label(yv) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 18
     << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\">"
     << x_label << "</text>\n";
  os << "<text x=\"22\" y=\"" << (T + H - B) / 2
     << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\" "
        "transform=\"rotate(-90 22 "
     << (T + H - B) / 2 << ")\">" << y_label << "</text>\n";

  // zero line when visible
  if (ymin < 0.0 && ymax > 0.0)
    os << "<line x1=\"" << L << "\" y1=\"" << coord(py(0.0)) << "\" x2=\""
       << W - R << "\" y2=\"" << coord(py(0.0))
       << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < x.size(); ++i)
      os << coord(px(x[i])) << "," << coord(py(series[s].y[i])) << " ";
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 10 << "\" y=\"" << T + 18 + 18 * s
       << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"13\" "
          "fill=\""
       << color << "\">" << series[s].name << "</text>\n";
  }
  os << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << os.str();
}

}  // namespace qbrown::io
