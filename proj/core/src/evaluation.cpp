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

#include "qlimits/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>

#include "qlimits/error.hpp"

namespace qlimits {

namespace {

constexpr std::size_t kPairwiseBlock = 8;

double pairwise(const double* v, std::size_t n) {
  if (n <= kPairwiseBlock) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise(v, half) + pairwise(v + half, n - half);
}

void check_ensemble(const ReconstructionEnsemble& recons, const Transmittance& truth,
                    std::size_t min_size) {
  require(recons.images.size() >= min_size, ErrorCode::kInvalidArgument,
          "ensemble needs at least " + std::to_string(min_size) + " image(s)");
  for (const Grid& img : recons.images) {
    require(img.rows() == truth.values.rows() && img.cols() == truth.values.cols(),
            ErrorCode::kDimensionMismatch, "reconstruction and truth differ in size");
  }
}

// Per-pixel ensemble reduction: out(p) = pairwise_sum_i f(images[i](p), p) / n.
template <typename F>
Grid ensemble_mean(const ReconstructionEnsemble& recons, Eigen::Index rows, Eigen::Index cols,
                   F&& f) {
  const std::size_t n = recons.images.size();
  std::vector<double> scratch(n);
  Grid out(rows, cols);
  for (Eigen::Index p = 0; p < out.size(); ++p) {
    for (std::size_t i = 0; i < n; ++i) scratch[i] = f(recons.images[i].data()[p], p);
    out.data()[p] = pairwise(scratch.data(), n) / static_cast<double>(n);
  }
  return out;
}

struct GaussianFit {
  double amplitude = 0.0;
  double mean = 0.0;
  double sigma = 0.0;
};

double gaussian(const GaussianFit& g, double x) {
  const double z = (x - g.mean) / g.sigma;
  return g.amplitude * std::exp(-0.5 * z * z);
}

// Levenberg-Marquardt least squares of counts against A exp(-(x-mu)^2/(2 s^2)).
GaussianFit fit_gaussian(const std::vector<double>& x, const std::vector<double>& y,
                         GaussianFit g) {
  double mu = 1e-3;
  auto cost = [&](const GaussianFit& h) {
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) c += std::pow(y[i] - gaussian(h, x[i]), 2);
    return c;
  };
  double current = cost(g);
  for (int it = 0; it < 200; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double z = (x[i] - g.mean) / g.sigma;
      const double e = std::exp(-0.5 * z * z);
      const Eigen::Vector3d d(e, g.amplitude * e * z / g.sigma, g.amplitude * e * z * z / g.sigma);
      jtj += d * d.transpose();
      jtr += d * (y[i] - g.amplitude * e);
    }
    bool improved = false;
    while (mu < 1e12) {
      Eigen::Matrix3d h = jtj;
      h.diagonal() *= 1.0 + mu;
      const Eigen::Vector3d step = h.ldlt().solve(jtr);
      GaussianFit trial{g.amplitude + step[0], g.mean + step[1], std::abs(g.sigma + step[2])};
      const double c = trial.sigma > 0.0 ? cost(trial) : std::numeric_limits<double>::infinity();
      if (c < current) {
        improved = current - c > 1e-12 * current;
        g = trial;
        current = c;
        mu *= 0.3;
        break;
      }
      mu *= 10.0;
    }
    if (!improved) break;
  }
  return g;
}

}  // namespace

double pairwise_sum(std::span<const double> values) { return pairwise(values.data(), values.size()); }

double pairwise_sum(const Grid& values) {
  return pairwise(values.data(), static_cast<std::size_t>(values.size()));
}

EvaluationReport mse_map(const ReconstructionEnsemble& recons, const Transmittance& truth) {
  check_ensemble(recons, truth, 1);
  const Grid& t = truth.values;
  EvaluationReport report;
  report.mse_map = ensemble_mean(recons, t.rows(), t.cols(), [&](double v, Eigen::Index p) {
    const double d = v - t.data()[p];
    return d * d;
  });
  report.total_mse = pairwise_sum(report.mse_map);
  report.ensemble_size = recons.images.size();
  report.provenance = recons.provenance;
  return report;
}

BiasVariance bias_variance(const ReconstructionEnsemble& recons, const Transmittance& truth) {
  check_ensemble(recons, truth, 2);
  const Grid& t = truth.values;
  const Grid mean =
      ensemble_mean(recons, t.rows(), t.cols(), [](double v, Eigen::Index) { return v; });
  BiasVariance out;
  out.bias_sq = (mean - t).square();
  out.variance = ensemble_mean(recons, t.rows(), t.cols(), [&](double v, Eigen::Index p) {
    const double d = v - mean.data()[p];
    return d * d;
  });
  return out;
}

EvaluationReport evaluate(const ReconstructionEnsemble& recons, const Transmittance& truth) {
  EvaluationReport report = mse_map(recons, truth);
  if (recons.images.size() >= 2) {
    BiasVariance bv = bias_variance(recons, truth);
    report.bias_sq_map = std::move(bv.bias_sq);
    report.variance_map = std::move(bv.variance);
    report.total_bias_sq = pairwise_sum(report.bias_sq_map);
    report.total_variance = pairwise_sum(report.variance_map);
  }
  return report;
}

void compare_bounds(EvaluationReport& report, std::span<const VarianceMap> bounds) {
  for (const VarianceMap& b : bounds) {
    require(b.values.rows() == report.mse_map.rows() && b.values.cols() == report.mse_map.cols(),
            ErrorCode::kDimensionMismatch,
            "bound map " + std::string(to_string(b.kind)) + " does not match the MSE grid");
    double ratio = 0.0;
    if (b.total > 0.0) {
      ratio = report.total_mse / b.total;
    } else if (report.total_mse > 0.0) {
      ratio = std::numeric_limits<double>::infinity();
    }
    std::erase_if(report.ratios, [&](const BoundRatio& r) { return r.bound == b.kind; });
    report.ratios.push_back(BoundRatio{b.kind, b.total, ratio});
  }
}

NormalityDiagnostic pixel_histogram(const ReconstructionEnsemble& recons, int row, int col,
                                    int bins) {
  require(!recons.images.empty(), ErrorCode::kInvalidArgument, "empty ensemble");
  require(bins >= 1, ErrorCode::kInvalidArgument, "histogram needs at least one bin");
  const Grid& first = recons.images.front();
  require(row >= 0 && col >= 0 && row < first.rows() && col < first.cols(),
          ErrorCode::kInvalidArgument,
          "pixel (" + std::to_string(row) + ", " + std::to_string(col) + ") is outside the image");

  std::vector<double> values;
  values.reserve(recons.images.size());
  for (const Grid& img : recons.images) values.push_back(img(row, col));
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  NormalityDiagnostic d;
  d.row = row;
  d.col = col;
  const double n = static_cast<double>(values.size());
  d.mean = pairwise_sum(values) / n;
  if (hi == lo) {
    d.degenerate = true;
    d.edges = {lo, hi};
    d.counts = {values.size()};
    return d;
  }

  d.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) d.edges[i] = lo + (hi - lo) * i / bins;
  d.counts.assign(bins, 0);
  for (double v : values) {
    const int b = std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins));
    ++d.counts[b];
  }

  std::vector<double> centers(bins), heights(bins);
  for (int i = 0; i < bins; ++i) {
    centers[i] = 0.5 * (d.edges[i] + d.edges[i + 1]);
    heights[i] = static_cast<double>(d.counts[i]);
  }
  double var = 0.0;
  for (double v : values) var += (v - d.mean) * (v - d.mean);
  const double sd = std::sqrt(var / n);
  const double width = (hi - lo) / bins;
  GaussianFit start{n * width / (sd * std::sqrt(2.0 * std::numbers::pi)), d.mean, sd};
  const GaussianFit fit = fit_gaussian(centers, heights, start);
  d.mean = fit.mean;
  d.sigma = fit.sigma;

  double chi2 = 0.0;
  int occupied = 0;
  for (int i = 0; i < bins; ++i) {
    if (d.counts[i] == 0) continue;
    ++occupied;
    const double model = gaussian(fit, centers[i]);
    chi2 += std::pow(heights[i] - model, 2) / std::max(model, 1.0);
  }
  d.goodness = occupied > 3 ? chi2 / (occupied - 3) : std::numeric_limits<double>::quiet_NaN();
  return d;
}

}  // namespace qlimits
