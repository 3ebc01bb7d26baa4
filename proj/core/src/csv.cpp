// Copyright 2026 The qlimits Authors.
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

#include "qlimits/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qlimits/error.hpp"

namespace qlimits {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::kIoError, "cannot write " + path.string());
  return out;
}

template <typename M>
void write_rows(const std::filesystem::path& path, const M& m) {
  std::ofstream out = open_for_write(path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_number(m(r, c));
    }
    out << '\n';
  }
  require(out.good(), ErrorCode::kIoError, "failed writing " + path.string());
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& matrix) {
  write_rows(path, matrix);
}

void write_csv(const std::filesystem::path& path, const Grid& grid) { write_rows(path, grid); }

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_for_write(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  require(out.good(), ErrorCode::kIoError, "failed writing " + path.string());
}

Eigen::MatrixXd read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIoError, "cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        require(used == cell.size(), ErrorCode::kFormatError, "bad CSV cell '" + cell + "'");
      } catch (const std::logic_error&) {
        fail(ErrorCode::kFormatError, "bad CSV cell '" + cell + "' in " + path.string());
      }
    }
    require(rows.empty() || row.size() == rows.front().size(), ErrorCode::kFormatError,
            "ragged CSV " + path.string());
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace qlimits
