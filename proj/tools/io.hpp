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

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace qbrown::io {

// 17 significant digits: doubles survive a write/parse round trip exactly.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Comma-separated table with '#'-prefixed comment lines and LF endings.
class CsvWriter {
 public:
  void comment(const std::string& line) { comments_.push_back(line); }
  void header(std::vector<std::string> columns) { columns_ = std::move(columns); }
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  void footer(const std::string& line) { footers_.push_back(line); }

  std::string str() const {
    std::ostringstream os;
    for (const auto& c : comments_) os << "# " << c << "\n";
    for (size_t i = 0; i < columns_.size(); ++i)
      os << columns_[i] << (i + 1 < columns_.size() ? "," : "");
    os << "\n";
    for (const auto& r : rows_) {
      for (size_t i = 0; i < r.size(); ++i)
        os << r[i] << (i + 1 < r.size() ? "," : "");
      os << "\n";
    }
    for (const auto& f : footers_) os << "# " << f << "\n";
    return os.str();
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << str();
  }

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> footers_;
};

struct CsvData {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  double num(size_t row, size_t col) const { return std::stod(rows[row][col]); }
};

inline CsvData parse_csv(std::istream& in) {
  CsvData data;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      data.columns = std::move(cells);
      have_header = true;
    } else {
      data.rows.push_back(std::move(cells));
    }
  }
  return data;
}

inline CsvData read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_csv(in);
}

// ---------------------------------------------------------------------------
// Minimal self-contained SVG line charts (no external fonts or scripts).

struct SvgSeries {
  std::string name;
  std::vector<double> y;
};

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<double>& x,
                     const std::vector<SvgSeries>& series);

}  // namespace qbrown::io
