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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qlimits/bounds.hpp"
#include "qlimits/estimators.hpp"
#include "qlimits/grid.hpp"

namespace qlimits {

/// Sum in a fixed pairwise tree so the result does not depend on how the
/// caller partitioned the work.
double pairwise_sum(std::span<const double> values);
double pairwise_sum(const Grid& values);

struct BoundRatio {
  MapKind bound = MapKind::kQcrbJacobian;
  double bound_total = 0.0;
  double ratio = 0.0;  // total_mse / bound_total
};

struct EvaluationReport {
  Grid mse_map;
  double total_mse = 0.0;
  Grid bias_sq_map;      // empty until bias_variance has run
  Grid variance_map;
  double total_bias_sq = 0.0;
  double total_variance = 0.0;
  std::vector<BoundRatio> ratios;
  std::size_t ensemble_size = 0;
  std::string provenance;
};

/// Per-pixel mean over the ensemble of (truth - estimate)^2; the total is the
/// pixel sum.
EvaluationReport mse_map(const ReconstructionEnsemble& recons, const Transmittance& truth);

struct BiasVariance {
  Grid bias_sq;
  Grid variance;  // population (1/n) convention
};

/// Needs at least two images. mse = bias_sq + variance pixel-wise.
BiasVariance bias_variance(const ReconstructionEnsemble& recons, const Transmittance& truth);

/// mse_map and bias_variance in one report.
EvaluationReport evaluate(const ReconstructionEnsemble& recons, const Transmittance& truth);

/// Appends one ratio per bound map to report.ratios (replacing earlier
/// entries of the same kind). A zero bound total yields +inf unless the MSE
/// is also zero.
void compare_bounds(EvaluationReport& report, std::span<const VarianceMap> bounds);

struct NormalityDiagnostic {
  int row = 0;
  int col = 0;
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
  double mean = 0.0;          // fitted Gaussian
  double sigma = 0.0;
  bool degenerate = false;    // every value identical; sigma is 0 and no fit is made
  double goodness = 0.0;      // reduced chi-square over occupied bins; NaN with fewer than 4
};

/// Histogram of one pixel across the ensemble with a least-squares Gaussian
/// fit to the bin densities.
NormalityDiagnostic pixel_histogram(const ReconstructionEnsemble& recons, int row, int col,
                                    int bins = 30);

}  // namespace qlimits
