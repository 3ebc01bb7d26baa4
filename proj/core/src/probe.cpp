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

#include "qlimits/probe.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qlimits/error.hpp"
#include "qlimits/parallel.hpp"

namespace qlimits {

namespace {

constexpr double kInversionLimit = 10.0;

// ln(k!) exactly tabulated below 10, Stirling series (to x^-7) above.
double log_factorial(double k) {
  static const std::array<double, 10> table = [] {
    std::array<double, 10> t{};
    double acc = 0.0;
    for (int i = 1; i < 10; ++i) {
      acc += std::log(static_cast<double>(i));
      t[i] = acc;
    }
    return t;
  }();
  if (k < 10.0) return table[static_cast<std::size_t>(k)];
  const double x = k + 1.0;
  const double x2 = x * x;
  const double series =
      1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x * x2 * x2) -
      1.0 / (1680.0 * x * x2 * x2 * x2);
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

std::uint32_t poisson_inversion(double mean, Rng& rng) {
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint32_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / k;
    if (p == 0.0) break;  // cdf has saturated below u through rounding
    cdf += p;
  }
  return k;
}

// W. Hormann, "The transformed rejection method for generating Poisson
// random variables", Insurance: Mathematics and Economics 12 (1993).
std::uint32_t poisson_ptrs(double mean, Rng& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint32_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - log_factorial(k)) {
      return static_cast<std::uint32_t>(k);
    }
  }
}

}  // namespace

std::string_view to_string(Convention convention) noexcept {
  return convention == Convention::kIntensityLinear ? "intensity_linear" : "amplitude_squared";
}

Convention parse_convention(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c != '_' && c != '-') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "intensitylinear" || key == "linear") return Convention::kIntensityLinear;
  if (key == "amplitudesquared" || key == "squared") return Convention::kAmplitudeSquared;
  fail(ErrorCode::kInvalidArgument, "unknown intensity convention '" + std::string(name) + "'");
}

ProbeConfig make_probe(const GridSpec& grid, double n_bar, Convention convention,
                       Grid illumination) {
  require(std::isfinite(n_bar) && n_bar > 0.0, ErrorCode::kInvalidArgument,
          "mean photon number must be positive");
  if (illumination.size() == 0) {
    illumination = Grid::Ones(grid.side, grid.side);
  }
  require_shape(illumination, grid, "illumination profile");
  require(illumination.allFinite() && (illumination >= 0.0).all(), ErrorCode::kInvalidArgument,
          "illumination must be finite and non-negative");
  return ProbeConfig{n_bar, std::move(illumination), convention, grid};
}

ExpectedMap expected_counts(const Transmittance& t, const ProbeConfig& probe) {
  require_shape(t.values, probe.grid, "transmittance");
  const double scale = probe.photons_per_pixel();
  if (probe.convention == Convention::kIntensityLinear) {
    return ExpectedMap{(scale * probe.illumination * t.values).eval()};
  }
  return ExpectedMap{(scale * probe.illumination * t.values.square()).eval()};
}

JacobianStack expected_counts_jacobian(const Transmittance& t, const JacobianStack& dt,
                                       const ProbeConfig& probe) {
  require_shape(t.values, probe.grid, "transmittance");
  require(dt.side == probe.grid.side, ErrorCode::kDimensionMismatch,
          "Jacobian grid does not match probe grid");
  const double scale = probe.photons_per_pixel();
  const Eigen::Map<const Eigen::VectorXd> alpha(probe.illumination.data(),
                                                probe.illumination.size());
  const Eigen::Map<const Eigen::VectorXd> tv(t.values.data(), t.values.size());
  Eigen::VectorXd gain = scale * alpha;
  if (probe.convention == Convention::kAmplitudeSquared) {
    gain = (gain.array() * 2.0 * tv.array()).matrix();
  }
  return JacobianStack{dt.side, (gain.asDiagonal() * dt.columns).eval()};
}

std::uint32_t sample_poisson(double mean, Rng& rng) {
  if (!(mean > 0.0)) return 0;
  return mean < kInversionLimit ? poisson_inversion(mean, rng) : poisson_ptrs(mean, rng);
}

Frame sample_frame(const ExpectedMap& lambda, std::uint64_t seed) {
  const Grid& lam = lambda.values;
  require(lam.allFinite() && (lam >= 0.0).all(), ErrorCode::kInvalidArgument,
          "expected counts must be finite and non-negative");
  Frame frame{CountGrid(lam.rows(), lam.cols()), seed};
  Rng rng(seed);
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    frame.counts.data()[i] = sample_poisson(lam.data()[i], rng);
  }
  return frame;
}

std::uint64_t frame_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return derive_seed(master_seed, Stream::kFrame, index);
}

FrameEnsemble sample_ensemble(const ExpectedMap& lambda, int count, std::uint64_t master_seed,
                              int threads) {
  require(count >= 1, ErrorCode::kInvalidArgument, "ensemble needs at least one frame");
  FrameEnsemble ensemble{static_cast<int>(lambda.values.rows()), master_seed,
                         std::vector<Frame>(static_cast<std::size_t>(count))};
  parallel_for(ensemble.frames.size(), threads, [&](std::size_t i) {
    ensemble.frames[i] = sample_frame(lambda, frame_seed(master_seed, i));
  });
  return ensemble;
}

}  // namespace qlimits
