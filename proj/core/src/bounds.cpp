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

#include "qlimits/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "qlimits/error.hpp"
#include "qlimits/parallel.hpp"
#include "qlimits/rng.hpp"

namespace qlimits {

namespace {

constexpr double kLambdaFloor = 1e-12;
constexpr int kMonteCarloBlock = 1024;

double finite_total(const Grid& values, int& excluded) {
  double total = 0.0;
  excluded = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values.data()[i];
    if (std::isfinite(v)) {
      total += v;
    } else {
      ++excluded;
    }
  }
  return total;
}

VarianceMap finish(Grid values, MapKind kind) {
  VarianceMap map{std::move(values), kind, 0.0, 0, 0.0};
  map.total = finite_total(map.values, map.excluded_pixels);
  return map;
}

// Lower-triangular factor with L L^T ~= S. Falls back to an eigenvalue
// factor if Cholesky still fails after jitter.
Eigen::MatrixXd sampling_factor(const Eigen::MatrixXd& sigma, double& jitter) {
  const Eigen::MatrixXd s = 0.5 * (sigma + sigma.transpose());
  const Eigen::Index n = s.rows();
  jitter = 0.0;
  if (s.isZero(0.0)) return Eigen::MatrixXd::Zero(n, n);

  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const double trace = s.trace();
  require(eig.eigenvalues().minCoeff() >= -1e-10 * std::abs(trace),
          ErrorCode::kNotPositiveSemidefinite,
          "covariance is not positive semidefinite (smallest eigenvalue " +
              std::to_string(eig.eigenvalues().minCoeff()) + ")");
  jitter = 1e-12 * std::abs(trace);
  llt.compute(s + jitter * Eigen::MatrixXd::Identity(n, n));
  if (llt.info() == Eigen::Success) return llt.matrixL();
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

std::string_view to_string(MapKind kind) noexcept {
  switch (kind) {
    case MapKind::kQcrbJacobian: return "qcrb_j";
    case MapKind::kQcrbMonteCarlo: return "qcrb_mc";
    case MapKind::kSql: return "sql";
    case MapKind::kHl: return "hl";
    case MapKind::kSqlTransmittance: return "sql_t";
    case MapKind::kHlTransmittance: return "hl_t";
  }
  return "unknown";
}

FisherMatrix qfim(const JacobianStack& dt, const ProbeConfig& probe) {
  require(dt.side == probe.grid.side && dt.columns.rows() == probe.grid.pixel_count(),
          ErrorCode::kDimensionMismatch, "Jacobian grid does not match probe grid");
  const Eigen::Map<const Eigen::VectorXd> alpha(probe.illumination.data(),
                                                probe.illumination.size());
  const double scale = 4.0 * probe.n_bar * probe.grid.pixel_weight();
  Eigen::MatrixXd f = scale * (dt.columns.transpose() * alpha.asDiagonal() * dt.columns);
  f = 0.5 * (f + f.transpose()).eval();
  return FisherMatrix{std::move(f), FisherKind::kQuantum, probe.n_bar};
}

FisherMatrix classical_poisson_fim(const JacobianStack& dlambda, const ExpectedMap& lambda,
                                   double n_bar) {
  const Eigen::Map<const Eigen::VectorXd> lam(lambda.values.data(), lambda.values.size());
  require(dlambda.columns.rows() == lam.size(), ErrorCode::kDimensionMismatch,
          "Jacobian and expected-count map differ in pixel count");
  const Eigen::MatrixXd& d = dlambda.columns;

  // Largest per-parameter information |dlambda|^2 / lambda over regular pixels.
  Eigen::VectorXd regular_info = Eigen::VectorXd::Zero(d.cols());
  for (Eigen::Index p = 0; p < lam.size(); ++p) {
    if (lam[p] >= kLambdaFloor) {
      regular_info = regular_info.cwiseMax((d.row(p).array().square() / lam[p]).matrix().transpose());
    }
  }

  // A pixel below the floor is harmless when its sensitivity vanishes with
  // lambda (amplitude detection near T = 0, where dlambda ~ sqrt(lambda)):
  // its information then stays within reach of the regular pixels. A
  // sensitivity that does not shrink with lambda makes the information
  // unbounded, which is the singular case.
  constexpr double kInfoMargin = 100.0;
  Eigen::VectorXd weight(lam.size());
  for (Eigen::Index p = 0; p < lam.size(); ++p) {
    if (lam[p] >= kLambdaFloor) {
      weight[p] = 1.0 / lam[p];
      continue;
    }
    const auto sq = d.row(p).array().square().transpose();
    const bool bounded =
        lam[p] > 0.0 ? (sq <= kInfoMargin * regular_info.array() * lam[p]).all() : (sq == 0.0).all();
    require(bounded, ErrorCode::kSingularModel,
            "pixel " + std::to_string(p) + " has zero expected counts but non-zero sensitivity");
    weight[p] = lam[p] > 0.0 ? 1.0 / lam[p] : 0.0;
  }
  Eigen::MatrixXd f = d.transpose() * weight.asDiagonal() * d;
  f = 0.5 * (f + f.transpose()).eval();
  return FisherMatrix{std::move(f), FisherKind::kClassicalPoisson, n_bar};
}

CovarianceBound invert_fim(const FisherMatrix& fisher, double rcond) {
  require(fisher.values.rows() == fisher.values.cols() && fisher.values.rows() > 0,
          ErrorCode::kInvalidArgument, "Fisher matrix must be square and non-empty");
  const Eigen::MatrixXd f = 0.5 * (fisher.values + fisher.values.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f);
  require(eig.info() == Eigen::Success, ErrorCode::kIllConditioned,
          "eigendecomposition of the Fisher matrix failed");

  const Eigen::VectorXd& ev = eig.eigenvalues();
  EigenReport report{ev, ev.minCoeff(), ev.maxCoeff()};
  if (!(report.largest > 0.0) || report.smallest < rcond * report.largest) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "Fisher matrix is ill-conditioned: eigenvalues [";
    for (Eigen::Index i = 0; i < ev.size(); ++i) msg << (i ? ", " : "") << ev[i];
    msg << "], rcond " << rcond;
    throw IllConditionedError(msg.str(), std::vector<double>(ev.data(), ev.data() + ev.size()));
  }
  Eigen::MatrixXd sigma = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                          eig.eigenvectors().transpose();
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return CovarianceBound{std::move(sigma), std::move(report)};
}

VarianceMap variance_map_jacobian(const JacobianStack& dt, const CovarianceBound& sigma) {
  require(sigma.values.rows() == dt.param_count() && sigma.values.cols() == dt.param_count(),
          ErrorCode::kDimensionMismatch, "covariance size does not match Jacobian");
  const Eigen::MatrixXd projected = dt.columns * sigma.values;
  const Eigen::VectorXd var = (projected.array() * dt.columns.array()).rowwise().sum();
  Grid values(dt.side, dt.side);
  Eigen::Map<Eigen::VectorXd>(values.data(), values.size()) = var.cwiseMax(0.0);
  return finish(std::move(values), MapKind::kQcrbJacobian);
}

VarianceMap variance_map_mc(const ParamVector& theta, const CovarianceBound& sigma,
                            const GridSpec& grid, const MonteCarloOptions& options) {
  validate(theta);
  const Eigen::Index n = theta.values.size();
  require(sigma.values.rows() == n && sigma.values.cols() == n, ErrorCode::kDimensionMismatch,
          "covariance size does not match parameter vector");
  require(options.samples >= 2, ErrorCode::kInvalidArgument,
          "Monte-Carlo variance needs at least two samples");

  double jitter = 0.0;
  const Eigen::MatrixXd factor = sampling_factor(sigma.values, jitter);
  const Grid truth = render_unchecked(theta, grid).values;
  const Eigen::Index n_pix = truth.size();

  const int blocks = (options.samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<Eigen::ArrayXd> sums(blocks), squares(blocks);
  parallel_for(static_cast<std::size_t>(blocks), options.threads, [&](std::size_t b) {
    Rng rng(derive_seed(options.seed, Stream::kMonteCarlo, b));
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(n_pix);
    Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(n_pix);
    const int begin = static_cast<int>(b) * kMonteCarloBlock;
    const int end = std::min(options.samples, begin + kMonteCarloBlock);
    Eigen::VectorXd z(n);
    ParamVector draw{theta.family, theta.values};
    for (int s = begin; s < end; ++s) {
      for (Eigen::Index k = 0; k < n; ++k) z[k] = rng.normal();
      draw.values = theta.values + factor * z;
      const Grid img = render_unchecked(draw, grid).values;
      const Eigen::Map<const Eigen::ArrayXd> d0(img.data(), n_pix);
      const Eigen::Map<const Eigen::ArrayXd> t0(truth.data(), n_pix);
      const Eigen::ArrayXd d = d0 - t0;
      sum += d;
      sq += d.square();
    }
    sums[b] = std::move(sum);
    squares[b] = std::move(sq);
  });

  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(n_pix);
  Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(n_pix);
  for (int b = 0; b < blocks; ++b) {
    sum += sums[b];
    sq += squares[b];
  }
  const double inv = 1.0 / options.samples;
  const Eigen::ArrayXd mean = sum * inv;
  Grid values(grid.side, grid.side);
  Eigen::Map<Eigen::ArrayXd>(values.data(), n_pix) = (sq * inv - mean.square()).max(0.0);
  VarianceMap map = finish(std::move(values), MapKind::kQcrbMonteCarlo);
  map.jitter = jitter;
  return map;
}

VarianceMap sql_map(const ExpectedMap& lambda) {
  const double inf = std::numeric_limits<double>::infinity();
  Grid values = lambda.values.unaryExpr([inf](double l) { return l > 0.0 ? 1.0 / l : inf; });
  return finish(std::move(values), MapKind::kSql);
}

VarianceMap hl_map(const ExpectedMap& lambda) {
  const double inf = std::numeric_limits<double>::infinity();
  Grid values =
      lambda.values.unaryExpr([inf](double l) { return l > 0.0 ? 1.0 / (l * l) : inf; });
  return finish(std::move(values), MapKind::kHl);
}

VarianceMap sql_map_transmittance(const ExpectedMap& lambda, const Transmittance& t,
                                  const ProbeConfig& probe) {
  require_shape(lambda.values, probe.grid, "expected counts");
  require_shape(t.values, probe.grid, "transmittance");
  const double inf = std::numeric_limits<double>::infinity();
  const double g = probe.photons_per_pixel();
  Grid values(probe.grid.side, probe.grid.side);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double ga = g * probe.illumination.data()[i];
    const double tv = t.values.data()[i];
    if (!(ga > 0.0)) {
      values.data()[i] = inf;
    } else if (probe.convention == Convention::kIntensityLinear) {
      values.data()[i] = tv / ga;  // lambda / (dlambda/dT)^2
    } else {
      values.data()[i] = 1.0 / (4.0 * ga);
    }
  }
  return finish(std::move(values), MapKind::kSqlTransmittance);
}

VarianceMap hl_map_transmittance(const ExpectedMap& lambda, const Transmittance& t,
                                 const ProbeConfig& probe) {
  require_shape(lambda.values, probe.grid, "expected counts");
  require_shape(t.values, probe.grid, "transmittance");
  const double inf = std::numeric_limits<double>::infinity();
  const double g = probe.photons_per_pixel();
  Grid values(probe.grid.side, probe.grid.side);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double ga = g * probe.illumination.data()[i];
    const double tv = t.values.data()[i];
    if (!(ga > 0.0)) {
      values.data()[i] = inf;
    } else if (probe.convention == Convention::kIntensityLinear) {
      values.data()[i] = tv > 0.0 ? 1.0 / (ga * ga) : inf;
    } else {
      values.data()[i] = tv > 0.0 ? 1.0 / (4.0 * ga * ga * tv * tv) : inf;
    }
  }
  return finish(std::move(values), MapKind::kHlTransmittance);
}

}  // namespace qlimits
