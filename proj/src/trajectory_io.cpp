// Copyright 2026 The turbosmooth Authors
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

#include "turbosmooth/trajectory_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "turbosmooth/errors.hpp"

namespace turbosmooth {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
      cell.pop_back();
    }
    out.push_back(cell);
  }
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DimensionMismatch("bad number in CSV: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_series_csv(std::ostream& out, const std::vector<std::string>& prefixes,
                      const std::vector<std::vector<Vector>>& columns) {
  if (prefixes.size() != columns.size()) {
    throw DimensionMismatch("one prefix per column group required");
  }
  std::size_t rows = columns.empty() ? 0 : columns.front().size();
  out << "t";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != rows) {
      throw LengthMismatch("column groups differ in length");
    }
    const Index width = rows == 0 ? 0 : columns[c].front().size();
    for (Index i = 0; i < width; ++i) {
      out << ',' << prefixes[c] << i;
    }
  }
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out << (r + 1);
    for (const auto& col : columns) {
      for (Index i = 0; i < col[r].size(); ++i) {
        out << ',' << format_double(col[r][i]);
      }
    }
    out << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const SimulatedTrajectory& traj) {
  if (traj.states.empty()) {
    write_series_csv(out, {"y"}, {traj.measurements});
  } else {
    write_series_csv(out, {"x", "y"}, {traj.states, traj.measurements});
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const SimulatedTrajectory& traj) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  write_trajectory_csv(out, traj);
}

SimulatedTrajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DimensionMismatch("empty trajectory file");
  }
  const auto header = split(line);
  if (header.empty() || header.front() != "t") {
    throw DimensionMismatch("trajectory header must start with 't'");
  }
  std::vector<std::size_t> x_cols;
  std::vector<std::size_t> y_cols;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& h = header[c];
    const std::string expected_x = "x" + std::to_string(x_cols.size());
    const std::string expected_y = "y" + std::to_string(y_cols.size());
    if (h == expected_x && y_cols.empty()) {
      x_cols.push_back(c);
    } else if (h == expected_y) {
      y_cols.push_back(c);
    } else {
      throw DimensionMismatch("unexpected column '" + h + "'");
    }
  }
  if (y_cols.empty()) {
    throw DimensionMismatch("trajectory file has no measurement columns");
  }

  SimulatedTrajectory traj;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw DimensionMismatch("row " + std::to_string(row + 1) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(header.size()));
    }
    ++row;
    if (!x_cols.empty()) {
      Vector x(static_cast<Index>(x_cols.size()));
      for (std::size_t i = 0; i < x_cols.size(); ++i) {
        x[static_cast<Index>(i)] = parse_double(cells[x_cols[i]]);
      }
      traj.states.push_back(std::move(x));
    }
    Vector y(static_cast<Index>(y_cols.size()));
    for (std::size_t i = 0; i < y_cols.size(); ++i) {
      y[static_cast<Index>(i)] = parse_double(cells[y_cols[i]]);
    }
    traj.measurements.push_back(std::move(y));
  }
  return traj;
}

SimulatedTrajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  return read_trajectory_csv(in);
}

}  // namespace turbosmooth
