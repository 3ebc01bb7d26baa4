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

#include "qlimits/grid.hpp"

namespace qlimits {

/// Mean SSIM over every fully contained window x window patch (uniform
/// weights), with C1 = (0.01 L)^2, C2 = (0.03 L)^2 and dynamic range L = 1.
/// Throws dimension-mismatch for unequal shapes and invalid-argument for an
/// even window or one larger than the image.
double ssim(const Grid& a, const Grid& b, int window = 11);

/// Gradient difference loss: mean over all horizontal and vertical forward
/// differences of (grad a - grad b)^2.
double gdl(const Grid& a, const Grid& b);

}  // namespace qlimits
