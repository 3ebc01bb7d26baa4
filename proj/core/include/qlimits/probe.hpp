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
#include <string_view>
#include <vector>

#include "qlimits/grid.hpp"
#include "qlimits/image_models.hpp"
#include "qlimits/rng.hpp"

namespace qlimits {

/// How detected intensity depends on transmittance T.
///   kIntensityLinear:  lambda proportional to T
///   kAmplitudeSquared: lambda proportional to T^2 (T is an amplitude
///                      transmittance; the classical Poisson Fisher
///                      information then coincides with the coherent-state
///                      QFIM)
enum class Convention { kIntensityLinear, kAmplitudeSquared };

std::string_view to_string(Convention convention) noexcept;
Convention parse_convention(std::string_view name);

struct ProbeConfig {
  double n_bar = 1000.0;  // mean photon number of the whole probe
  Grid illumination;      // |alpha(x, y)|^2, dimensionless
  Convention convention = Convention::kAmplitudeSquared;
  GridSpec grid;

  /// Photons per pixel at unit transmittance and unit illumination.
  double photons_per_pixel() const noexcept { return n_bar * grid.pixel_weight(); }
};

/// Uniform illumination unless a profile is given. Throws invalid-argument for
/// n_bar <= 0 or negative illumination, dimension-mismatch for a wrongly
/// sized profile.
ProbeConfig make_probe(const GridSpec& grid, double n_bar,
                       Convention convention = Convention::kAmplitudeSquared,
                       Grid illumination = Grid());

struct ExpectedMap {
  Grid values;  // photons per pixel per frame
};

struct Frame {
  CountGrid counts;
  std::uint64_t seed = 0;
};

struct FrameEnsemble {
  int side = 0;
  std::uint64_t master_seed = 0;
  std::vector<Frame> frames;
};

/// lambda = n_bar * |alpha|^2 * g(T) / side^2, g(T) = T or T^2.
ExpectedMap expected_counts(const Transmittance& t, const ProbeConfig& probe);

/// d(lambda)/d(theta) from dT/d(theta) by the chain rule.
JacobianStack expected_counts_jacobian(const Transmittance& t, const JacobianStack& dt,
                                       const ProbeConfig& probe);

/// Exact Poisson draw. Means below 10 use sequential-search inversion of the
/// CDF (one uniform per draw); larger means use Hormann's PTRS transformed
/// rejection. See docs/poisson_sampler.md for the constants.
std::uint32_t sample_poisson(double mean, Rng& rng);

Frame sample_frame(const ExpectedMap& lambda, std::uint64_t seed);

/// Seed of frame `index` in an ensemble: derive_seed(master, Stream::kFrame, index).
std::uint64_t frame_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

/// `count` independent frames, frame i drawn with frame_seed(master_seed, i).
/// Output bytes do not depend on `threads`.
FrameEnsemble sample_ensemble(const ExpectedMap& lambda, int count, std::uint64_t master_seed,
                              int threads = 1);

}  // namespace qlimits
