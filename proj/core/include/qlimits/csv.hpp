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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qlimits/grid.hpp"

namespace qlimits {

/// Shortest round-trip formatting is not used; every value is written with
/// 17 significant digits so files compare byte-for-byte across runs.
std::string format_number(double value);

/// Row-major CSV, one matrix row per line, no header.
void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& matrix);
void write_csv(const std::filesystem::path& path, const Grid& grid);

/// Tabular CSV with a header line.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

/// Parses a headerless numeric CSV back into a matrix. Throws format-error.
Eigen::MatrixXd read_csv(const std::filesystem::path& path);

}  // namespace qlimits
