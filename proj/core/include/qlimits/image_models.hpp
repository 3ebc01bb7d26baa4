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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "qlimits/grid.hpp"

namespace qlimits {

/// Parameterized sinusoid families. Parameter layouts (index order):
///
///   SingleLinear  (3):  omega, beta, phi
///   DoubleLinear  (7):  a1, omega1, beta1, phi1, omega2, beta2, phi2
///   TripleLinear  (11): a1, a2, omega1, beta1, phi1, omega2, beta2, phi2,
///                       omega3, beta3, phi3
///   RadialLinear  (6):  a, omega_r, phi_r, omega_l, beta_l, phi_l
///   DoubleRadial  (7):  a1, omega1, phi1, omega2, phi2, x0, y0
///
/// A linear component is sin(omega * (x cos(beta) + y sin(beta) + phi)); a
/// radial one is sin(omega * r + phi) with r measured from the origin, or
/// from (x0, y0) for the second DoubleRadial component. The last amplitude is
/// always one minus the sum of the free ones.
enum class Family { kSingleLinear, kDoubleLinear, kTripleLinear, kRadialLinear, kDoubleRadial };

inline constexpr Family kAllFamilies[] = {Family::kSingleLinear, Family::kDoubleLinear,
                                          Family::kTripleLinear, Family::kRadialLinear,
                                          Family::kDoubleRadial};

std::string_view to_string(Family family) noexcept;

/// Accepts the canonical names ("single_linear", ...) case-insensitively.
/// Throws invalid-argument for anything else.
Family parse_family(std::string_view name);

enum class ParamKind { kAmplitude, kFrequency, kAngle, kLinearPhase, kRadialPhase, kOffset };

int param_count(Family family) noexcept;
std::span<const ParamKind> param_kinds(Family family) noexcept;
std::vector<std::string> param_names(Family family);

struct ParamVector {
  Family family = Family::kSingleLinear;
  Eigen::VectorXd values;
};

/// Throws invalid-argument when the vector length does not match the family.
void validate(const ParamVector& theta);

struct ParamBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// Sampling box per parameter kind: a in [0, 1], omega in [0.5/side, 4/side],
/// beta and phi in [-pi, pi], offsets in [-side/2, side/2] (times grid scale).
ParamBounds default_bounds(Family family, const GridSpec& grid);

bool within(const ParamVector& theta, const ParamBounds& bounds) noexcept;

/// Amplitudes of every component including the implied last one.
Eigen::VectorXd component_amplitudes(const ParamVector& theta);

struct RawImage {
  Grid values;
};

struct Transmittance {
  Grid values;
};

/// Per-parameter image derivatives. Column k holds d(image)/d(theta_k) for
/// all pixels in row-major order.
struct JacobianStack {
  int side = 0;
  Eigen::MatrixXd columns;

  int param_count() const noexcept { return static_cast<int>(columns.cols()); }
  Grid layer(int k) const;
};

RawImage eval_raw(const ParamVector& theta, const GridSpec& grid);

/// T = (1 + f) / 2. Throws invalid-argument if any value of f lies outside
/// [-1, 1] by more than 1e-12; values inside that slack are clamped.
Transmittance to_transmittance(const RawImage& raw);

/// eval_raw followed by the (1 + f) / 2 map without the range check. Used
/// where parameters may legitimately leave the sampling box (Monte-Carlo
/// draws, optimizer iterates).
Transmittance render_unchecked(const ParamVector& theta, const GridSpec& grid);

/// Closed-form dT/dtheta, including the 1/2 from the transmittance map and
/// the -1 coupling through the implied last amplitude. Radial offset
/// derivatives are defined as zero at the singular pixel r = 0.
JacobianStack analytic_jacobian(const ParamVector& theta, const GridSpec& grid);

/// Renders T and its Jacobian in one pass.
void render_with_jacobian(const ParamVector& theta, const GridSpec& grid, Grid& transmittance,
                          Eigen::MatrixXd& jacobian);

/// Independent uniform draws inside the bounds. TripleLinear amplitudes are
/// redrawn until the implied third amplitude is also in [0, 1].
ParamVector sample_params(Family family, const ParamBounds& bounds, std::uint64_t seed);

}  // namespace qlimits
