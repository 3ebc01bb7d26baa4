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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "qlimits/error.hpp"
#include "qlimits/estimators.hpp"
#include "qlimits/rng.hpp"

namespace qlimits {

namespace {

using std::numbers::pi;

double wrap_pi(double x) { return x - 2.0 * pi * std::floor((x + pi) / (2.0 * pi)); }

double wrap_period(double x, double period) {
  return x - period * std::floor((x + 0.5 * period) / period);
}

int free_amplitudes(Family family) {
  switch (family) {
    case Family::kSingleLinear: return 0;
    case Family::kTripleLinear: return 2;
    default: return 1;
  }
}

// Euclidean projection of the free amplitudes onto their feasible set.
void project_amplitudes(Eigen::VectorXd& v, Family family) {
  const int n = free_amplitudes(family);
  if (n == 1) {
    v[0] = std::clamp(v[0], 0.0, 1.0);
  } else if (n == 2) {
    double a1 = std::max(v[0], 0.0);
    double a2 = std::max(v[1], 0.0);
    if (a1 + a2 > 1.0) {
      const double excess = 0.5 * (a1 + a2 - 1.0);
      a1 -= excess;
      a2 -= excess;
      if (a1 < 0.0) {
        a1 = 0.0;
        a2 = 1.0;
      } else if (a2 < 0.0) {
        a2 = 0.0;
        a1 = 1.0;
      }
    }
    v[0] = a1;
    v[1] = a2;
  }
}

// Zeroes gradient components that point out of the amplitude set.
Eigen::VectorXd project_gradient(const Eigen::VectorXd& g, const Eigen::VectorXd& v,
                                 Family family) {
  Eigen::VectorXd pg = g;
  const int n = free_amplitudes(family);
  if (n == 2 && v[0] + v[1] >= 1.0 && pg[0] + pg[1] < 0.0) {
    const double along = 0.5 * (pg[0] + pg[1]);
    pg[0] -= along;
    pg[1] -= along;
  }
  for (int i = 0; i < n; ++i) {
    if (v[i] <= 0.0 && pg[i] > 0.0) pg[i] = 0.0;
    if (v[i] >= 1.0 && pg[i] < 0.0) pg[i] = 0.0;
  }
  return pg;
}

class Objective {
 public:
  Objective(const Grid& counts, Family family, const ProbeConfig& probe, double floor)
      : counts_(Eigen::Map<const Eigen::VectorXd>(counts.data(), counts.size())),
        alpha_(Eigen::Map<const Eigen::VectorXd>(probe.illumination.data(),
                                                 probe.illumination.size())),
        family_(family),
        probe_(probe),
        floor_(floor) {}

  double nll(const Eigen::VectorXd& v) const {
    const Grid t = render_unchecked(ParamVector{family_, v}, probe_.grid).values;
    const Eigen::Map<const Eigen::VectorXd> tv(t.data(), t.size());
    return nll_from(lambda_of(tv));
  }

  struct Linearization {
    double nll = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd fisher;
  };

  Linearization linearize(const Eigen::VectorXd& v) const {
    Grid t;
    Eigen::MatrixXd dt;
    render_with_jacobian(ParamVector{family_, v}, probe_.grid, t, dt);
    const Eigen::Map<const Eigen::VectorXd> tv(t.data(), t.size());
    const Eigen::VectorXd lambda = lambda_of(tv);
    Eigen::VectorXd gain = probe_.photons_per_pixel() * alpha_;
    if (probe_.convention == Convention::kAmplitudeSquared) {
      gain = (gain.array() * 2.0 * tv.array()).matrix();
    }
    const Eigen::MatrixXd dlambda = gain.asDiagonal() * dt;
    const Eigen::VectorXd safe = lambda.cwiseMax(floor_);
    const Eigen::VectorXd residual =
        (Eigen::VectorXd::Ones(safe.size()) - counts_.cwiseQuotient(safe));
    Linearization out;
    out.nll = nll_from(lambda);
    out.gradient = dlambda.transpose() * residual;
    out.fisher = dlambda.transpose() * safe.cwiseInverse().asDiagonal() * dlambda;
    return out;
  }

 private:
  Eigen::VectorXd lambda_of(const Eigen::Map<const Eigen::VectorXd>& tv) const {
    const double s = probe_.photons_per_pixel();
    if (probe_.convention == Convention::kIntensityLinear) {
      return s * alpha_.cwiseProduct(tv);
    }
    return s * alpha_.cwiseProduct(tv.cwiseAbs2());
  }

  double nll_from(const Eigen::VectorXd& lambda) const {
    double total = 0.0;
    for (Eigen::Index p = 0; p < lambda.size(); ++p) {
      total += lambda[p];
      if (counts_[p] != 0.0) total -= counts_[p] * std::log(std::max(lambda[p], floor_));
    }
    return total;
  }

  Eigen::Map<const Eigen::VectorXd> counts_;
  Eigen::Map<const Eigen::VectorXd> alpha_;
  Family family_;
  const ProbeConfig& probe_;
  double floor_;
};

FitResult fit_from(const Objective& objective, Eigen::VectorXd v, Family family,
                   const MlConfig& config) {
  project_amplitudes(v, family);
  auto lin = objective.linearize(v);
  Eigen::VectorXd pg = project_gradient(lin.gradient, v, family);
  double pg_norm = pg.lpNorm<Eigen::Infinity>();
  double mu = config.initial_damping;
  FitResult result;
  result.theta = ParamVector{family, v};
  int it = 0;
  bool converged = pg_norm <= config.gradient_tolerance;

  while (!converged && it < config.max_iterations) {
    ++it;
    const double diag_floor = 1e-12 * std::max(lin.fisher.diagonal().maxCoeff(), 1e-300);
    const Eigen::VectorXd diag = lin.fisher.diagonal().cwiseMax(diag_floor);
    bool accepted = false;
    while (mu <= config.max_damping) {
      Eigen::MatrixXd h = lin.fisher;
      h.diagonal() += mu * diag;
      const Eigen::VectorXd step = h.ldlt().solve(-lin.gradient);
      Eigen::VectorXd trial = v + step;
      project_amplitudes(trial, family);
      if (!step.allFinite() || trial == v) {
        mu *= config.damping_increase;
        continue;
      }
      const double trial_nll = objective.nll(trial);
      const double tie = 16.0 * std::numeric_limits<double>::epsilon() *
                         std::max(std::abs(lin.nll), 1.0);
      if (trial_nll < lin.nll - tie) {
        accepted = true;
      } else if (std::abs(trial_nll - lin.nll) <= tie) {
        // Rounding-level NLL change: accept only if the gradient shrinks.
        const auto trial_lin = objective.linearize(trial);
        const double trial_pg =
            project_gradient(trial_lin.gradient, trial, family).lpNorm<Eigen::Infinity>();
        accepted = trial_pg < pg_norm;
      }
      if (accepted) {
        v = std::move(trial);
        mu = std::max(mu * config.damping_decrease, 1e-15);
        break;
      }
      mu *= config.damping_increase;
    }
    if (!accepted) {
      // Damping exhausted. If the Newton decrement is at rounding level the
      // iterate is as stationary as double precision can resolve.
      const Eigen::VectorXd newton = lin.fisher.ldlt().solve(-lin.gradient);
      const double decrement = -0.5 * lin.gradient.dot(newton);
      converged = newton.allFinite() &&
                  decrement <= 1e3 * std::numeric_limits<double>::epsilon() *
                                   std::max(std::abs(lin.nll), 1.0);
      break;
    }
    lin = objective.linearize(v);
    pg = project_gradient(lin.gradient, v, family);
    pg_norm = pg.lpNorm<Eigen::Infinity>();
    converged = pg_norm <= config.gradient_tolerance;
  }
  result.theta.values = v;
  result.converged = converged && v.allFinite();
  result.iterations = it;
  result.nll = lin.nll;
  result.gradient_norm = pg_norm;
  return result;
}

Eigen::VectorXd perturb(const Eigen::VectorXd& v, const ParamBounds& bounds, double fraction,
                        Rng& rng) {
  Eigen::VectorXd out = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[i] += fraction * (bounds.upper[i] - bounds.lower[i]) * rng.normal();
  }
  return out;
}

}  // namespace

ParamVector canonicalize(const ParamVector& theta, std::vector<std::string>* wrapped) {
  validate(theta);
  const auto kinds = param_kinds(theta.family);
  const auto names = param_names(theta.family);
  Eigen::VectorXd v = theta.values;

  // Fix signs and ranges component by component.
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (kinds[i] != ParamKind::kFrequency) continue;
    const bool linear = i + 1 < v.size() && kinds[i + 1] == ParamKind::kAngle;
    if (linear) {
      double& omega = v[i];
      double& beta = v[i + 1];
      double& phi = v[i + 2];
      if (omega < 0.0) {
        omega = -omega;
        beta += pi;
        phi = -phi;
      }
      beta = wrap_pi(beta);
      // sin(a) = sin(pi - a): turning the stripes by pi is the same image
      // when phi -> pi/omega - phi, so only half the circle is distinct.
      if (omega > 0.0 && (beta >= 0.5 * pi || beta < -0.5 * pi)) {
        beta = beta >= 0.5 * pi ? beta - pi : beta + pi;
        phi = pi / omega - phi;
      }
      if (omega > 0.0) phi = wrap_period(phi, 2.0 * pi / omega);
    } else {
      double& omega = v[i];
      double& phi = v[i + 1];
      if (omega < 0.0) {
        omega = -omega;
        phi = pi - phi;
      }
      phi = wrap_pi(phi);
    }
  }

  // Interchangeable linear components: order by omega.
  if (theta.family == Family::kDoubleLinear || theta.family == Family::kTripleLinear) {
    const int free = free_amplitudes(theta.family);
    const int comps = free + 1;
    const Eigen::VectorXd amps = component_amplitudes(ParamVector{theta.family, v});
    std::vector<int> order(comps);
    for (int c = 0; c < comps; ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return v[free + 3 * a] < v[free + 3 * b]; });
    Eigen::VectorXd sorted = v;
    for (int c = 0; c < comps; ++c) {
      const int src = order[c];
      if (c < free) sorted[c] = amps[src];
      for (int k = 0; k < 3; ++k) sorted[free + 3 * c + k] = v[free + 3 * src + k];
    }
    v = sorted;
  }

  if (wrapped != nullptr) {
    wrapped->clear();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v[i] != theta.values[i]) wrapped->push_back(names[i]);
    }
  }
  return ParamVector{theta.family, v};
}

double poisson_nll(const Grid& counts, const ParamVector& theta, const ProbeConfig& probe,
                   double lambda_floor) {
  validate(theta);
  require_shape(counts, probe.grid, "counts");
  return Objective(counts, theta.family, probe, lambda_floor).nll(theta.values);
}

FitResult ml_fit(const Grid& counts, Family family, const ProbeConfig& probe,
                 const MlConfig& config) {
  config.validate();
  require_shape(counts, probe.grid, "counts");
  require(counts.allFinite() && (counts >= 0.0).all(), ErrorCode::kInvalidArgument,
          "counts must be finite and non-negative");
  const ParamBounds bounds = default_bounds(family, probe.grid);
  const Objective objective(counts, family, probe, config.lambda_floor);
  Rng rng(config.seed);

  std::vector<Eigen::VectorXd> starts;
  try {
    const ParamVector init = spectral_init(counts, family, probe.grid);
    starts.push_back(init.values);
    for (int j = 1; j <= 3 && static_cast<int>(starts.size()) < config.multistart; ++j) {
      starts.push_back(perturb(init.values, bounds, config.perturbation, rng));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInitFailed) throw;
  }
  while (static_cast<int>(starts.size()) < config.multistart) {
    starts.push_back(sample_params(family, bounds, rng.next_u64()).values);
  }

  std::optional<FitResult> best;
  std::optional<FitResult> best_partial;
  int converged = 0;
  for (const auto& start : starts) {
    FitResult r = fit_from(objective, start, family, config);
    if (!std::isfinite(r.nll)) continue;
    if (r.converged) {
      ++converged;
      if (!best || r.nll < best->nll) best = std::move(r);
    } else if (!best_partial || r.nll < best_partial->nll) {
      best_partial = std::move(r);
    }
  }

  FitResult out;
  if (best) {
    out = std::move(*best);
  } else {
    require(best_partial.has_value(), ErrorCode::kNonConvergence,
            "every likelihood start diverged");
    out = std::move(*best_partial);
  }
  out.starts = static_cast<int>(starts.size());
  out.converged_starts = converged;
  out.theta = canonicalize(out.theta, &out.wrapped);
  if (!best) throw NonConvergenceError(std::move(out));
  return out;
}

FitResult ml_fit(const Frame& frame, Family family, const ProbeConfig& probe,
                 const MlConfig& config) {
  const Grid counts = frame.counts.cast<double>();
  return ml_fit(counts, family, probe, config);
}

}  // namespace qlimits
