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

#include "qlimits/grid.hpp"

#include <string>

#include "qlimits/error.hpp"

namespace qlimits {

GridSpec make_grid(int side, double scale) {
  require(side >= 2 && side % 2 == 0, ErrorCode::kInvalidArgument,
          "grid side must be a positive even integer, got " + std::to_string(side));
  require(scale > 0.0, ErrorCode::kInvalidArgument, "grid scale must be positive");
  return GridSpec{side, scale};
}

void require_shape(const Grid& grid, const GridSpec& spec, const char* what) {
  require(grid.rows() == spec.side && grid.cols() == spec.side, ErrorCode::kDimensionMismatch,
          std::string(what) + " is " + std::to_string(grid.rows()) + "x" +
              std::to_string(grid.cols()) + ", grid is " + std::to_string(spec.side) + "x" +
              std::to_string(spec.side));
}

}  // namespace qlimits
