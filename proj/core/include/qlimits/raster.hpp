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

#include "qlimits/grid.hpp"
#include "qlimits/image_models.hpp"

namespace qlimits {

/// Loads an unparameterized transmittance image.
///
/// Accepts binary 8-bit PGM (P5, maxval <= 255; values divided by maxval) or
/// an IMGX file (frame `frame_index`; f32 data already inside [0, 1] is kept
/// as-is, anything else is min-max rescaled; u32 data is divided by its
/// maximum). Images are never resampled: a size other than the grid side is a
/// dimension-mismatch. Unreadable or malformed files are a format-error.
Transmittance load_raster(const std::filesystem::path& path, const GridSpec& grid,
                          int frame_index = 0);

/// Writes T in [0, 1] as an 8-bit P5 PGM (rounded to nearest of 255 levels).
void write_pgm(const std::filesystem::path& path, const Grid& image);

}  // namespace qlimits
