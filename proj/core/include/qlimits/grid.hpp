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

#include <cstdint>

#include <Eigen/Core>

namespace qlimits {

/// Row-major real image. Row index is y, column index is x, so flattening
/// matches the row-major on-disk layout of IMGX frames.
using Grid = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CountGrid = Eigen::Array<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Square pixel lattice with centered coordinates.
///
/// Pixel (row, col) sits at x = scale * (col - side/2), y = scale * (row - side/2),
/// so pixel (0, 0) is at (-side/2, -side/2) for the default unit scale. Each
/// pixel carries quadrature weight 1/side^2, making the image area integrate
/// to one regardless of scale.
struct GridSpec {
  int side = 64;
  double scale = 1.0;

  int pixel_count() const noexcept { return side * side; }
  double pixel_weight() const noexcept { return 1.0 / (static_cast<double>(side) * side); }
  double x(int col) const noexcept { return scale * (col - side / 2); }
  double y(int row) const noexcept { return scale * (row - side / 2); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Throws invalid-argument unless side is a positive even integer and scale > 0.
GridSpec make_grid(int side, double scale = 1.0);

void require_shape(const Grid& grid, const GridSpec& spec, const char* what);

}  // namespace qlimits
