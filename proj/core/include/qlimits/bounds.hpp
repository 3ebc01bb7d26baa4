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

#include <Eigen/Core>

#include "qlimits/grid.hpp"
#include "qlimits/image_models.hpp"
#include "qlimits/probe.hpp"

namespace qlimits {

enum class FisherKind { kQuantum, kClassicalPoisson };

struct FisherMatrix {
  Eigen::MatrixXd values;
  FisherKind kind = FisherKind::kQuantum;
  double n_bar = 0.0;
};

struct EigenReport {
  Eigen::VectorXd eigenvalues;  // ascending
  double smallest = 0.0;
  double largest = 0.0;
};

struct CovarianceBound {
  Eigen::MatrixXd values;
  EigenReport conditioning;  // spectrum of the Fisher matrix that was inverted
};

enum class MapKind {
  kQcrbJacobian,
  kQcrbMonteCarlo,
  kSql,                // 1 / lambda, detected-count units
  kHl,                 // 1 / lambda^2, detected-count units
  kSqlTransmittance,   // SQL divided by the squared relative gain, transmittance^2 units
  kHlTransmittance,
};

std::string_view to_string(MapKind kind) noexcept;

struct VarianceMap {
  Grid values;
  MapKind kind = MapKind::kQcrbJacobian;
  double total = 0.0;       // pixel sum, excluding sentinel pixels
  int excluded_pixels = 0;  // pixels set to +inf because lambda == 0
  double jitter = 0.0;      // diagonal jitter added before Cholesky (MC only)
};

/// Coherent-state QFIM for transmittance imaging:
///   F_ij = 4 n_bar sum_p w |alpha_p|^2 dT_p/dtheta_i dT_p/dtheta_j,  w = 1/side^2.
FisherMatrix qfim(const JacobianStack& dt, const ProbeConfig& probe);

/// Poisson Fisher information F_ij = sum_p dlambda_i dlambda_j / lambda_p.
/// Pixels with lambda below 1e-12 must have a sensitivity that vanishes with
/// lambda (information |dlambda|^2 / lambda within 100x of the largest over
/// regular pixels; exactly zero when lambda is 0), otherwise the model is
/// singular and singular-model is thrown.
FisherMatrix classical_poisson_fim(const JacobianStack& dlambda, const ExpectedMap& lambda,
                                   double n_bar);

/// Sigma = F^-1 through the symmetric eigendecomposition. Eigenvalues below
/// rcond * lambda_max raise IllConditionedError with the full spectrum.
CovarianceBound invert_fim(const FisherMatrix& fisher, double rcond = 1e-10);

/// Var_p = J_p^T Sigma J_p.
VarianceMap variance_map_jacobian(const JacobianStack& dt, const CovarianceBound& sigma);

struct MonteCarloOptions {
  int samples = 100000;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Population variance per pixel of T(theta_s), theta_s ~ Normal(theta, Sigma).
/// Samples are processed in fixed blocks of 1024 with counter-derived seeds
/// and merged in block order, so the result is independent of `threads`.
VarianceMap variance_map_mc(const ParamVector& theta, const CovarianceBound& sigma,
                            const GridSpec& grid, const MonteCarloOptions& options);

/// 1/lambda per pixel. Zero-lambda pixels become +inf and are excluded from
/// the total (counted in excluded_pixels).
VarianceMap sql_map(const ExpectedMap& lambda);

/// 1/lambda^2 per pixel with the same sentinel policy as sql_map.
VarianceMap hl_map(const ExpectedMap& lambda);

/// Transmittance-unit variants: the count-unit map divided by G^2 where
/// G = (dlambda/dT) / lambda is the relative count-to-transmittance gain
/// (1/T for intensity-linear, 2/T for amplitude-squared detection). The SQL
/// variant equals the per-pixel shot-noise variance of the plug-in estimate.
VarianceMap sql_map_transmittance(const ExpectedMap& lambda, const Transmittance& t,
                                  const ProbeConfig& probe);
VarianceMap hl_map_transmittance(const ExpectedMap& lambda, const Transmittance& t,
                                 const ProbeConfig& probe);

}  // namespace qlimits
