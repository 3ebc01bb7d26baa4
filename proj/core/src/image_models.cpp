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

#include "qlimits/image_models.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "qlimits/error.hpp"
#include "qlimits/rng.hpp"

namespace qlimits {

namespace {

using std::numbers::pi;

struct Component {
  bool radial = false;
  int omega = -1;
  int beta = -1;  // linear only
  int phase = -1;
  int cx = -1;  // radial center offsets, -1 means the origin
  int cy = -1;
};

struct Layout {
  int free_amplitudes = 0;
  std::vector<Component> components;
};

Component linear(int omega) { return Component{false, omega, omega + 1, omega + 2, -1, -1}; }
Component radial(int omega, int cx = -1, int cy = -1) {
  return Component{true, omega, -1, omega + 1, cx, cy};
}

const Layout& layout(Family family) {
  static const Layout single{0, {linear(0)}};
  static const Layout dbl{1, {linear(1), linear(4)}};
  static const Layout triple{2, {linear(2), linear(5), linear(8)}};
  static const Layout radial_linear{1, {radial(1), linear(3)}};
  static const Layout double_radial{1, {radial(1), radial(3, 5, 6)}};
  switch (family) {
    case Family::kSingleLinear: return single;
    case Family::kDoubleLinear: return dbl;
    case Family::kTripleLinear: return triple;
    case Family::kRadialLinear: return radial_linear;
    case Family::kDoubleRadial: return double_radial;
  }
  return single;
}

using K = ParamKind;
constexpr std::array kSingleKinds{K::kFrequency, K::kAngle, K::kLinearPhase};
constexpr std::array kDoubleKinds{K::kAmplitude, K::kFrequency, K::kAngle,      K::kLinearPhase,
                                  K::kFrequency, K::kAngle,     K::kLinearPhase};
constexpr std::array kTripleKinds{K::kAmplitude, K::kAmplitude, K::kFrequency,  K::kAngle,
                                  K::kLinearPhase, K::kFrequency, K::kAngle,    K::kLinearPhase,
                                  K::kFrequency, K::kAngle,     K::kLinearPhase};
constexpr std::array kRadialLinearKinds{K::kAmplitude, K::kFrequency, K::kRadialPhase,
                                        K::kFrequency, K::kAngle,     K::kLinearPhase};
constexpr std::array kDoubleRadialKinds{K::kAmplitude,   K::kFrequency, K::kRadialPhase,
                                        K::kFrequency,   K::kRadialPhase, K::kOffset,
                                        K::kOffset};

std::string normalized(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

struct ComponentCache {
  double omega = 0.0;
  double phase = 0.0;
  double cos_beta = 1.0;
  double sin_beta = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

template <bool kWithJacobian>
void render_kernel(const ParamVector& theta, const GridSpec& grid, Grid& raw,
                   Eigen::MatrixXd* jacobian) {
  validate(theta);
  const Layout& lay = layout(theta.family);
  const auto& v = theta.values;
  const int n_comp = static_cast<int>(lay.components.size());
  const Eigen::VectorXd amps = component_amplitudes(theta);

  std::array<ComponentCache, 3> cache{};
  for (int c = 0; c < n_comp; ++c) {
    const Component& comp = lay.components[c];
    cache[c].omega = v[comp.omega];
    cache[c].phase = v[comp.phase];
    if (!comp.radial) {
      cache[c].cos_beta = std::cos(v[comp.beta]);
      cache[c].sin_beta = std::sin(v[comp.beta]);
    }
    if (comp.cx >= 0) {
      cache[c].cx = v[comp.cx];
      cache[c].cy = v[comp.cy];
    }
  }

  const int side = grid.side;
  raw.resize(side, side);
  if constexpr (kWithJacobian) {
    jacobian->setZero(grid.pixel_count(), theta.values.size());
  }

  std::array<double, 3> s{};
  for (int row = 0; row < side; ++row) {
    const double y = grid.y(row);
    for (int col = 0; col < side; ++col) {
      const double x = grid.x(col);
      const int p = row * side + col;
      double f = 0.0;
      for (int c = 0; c < n_comp; ++c) {
        const Component& comp = lay.components[c];
        const ComponentCache& cc = cache[c];
        if (!comp.radial) {
          const double u = x * cc.cos_beta + y * cc.sin_beta + cc.phase;
          const double arg = cc.omega * u;
          s[c] = std::sin(arg);
          if constexpr (kWithJacobian) {
            const double ca = amps[c] * std::cos(arg);
            auto& J = *jacobian;
            J(p, comp.omega) = ca * u;
            J(p, comp.beta) = ca * cc.omega * (-x * cc.sin_beta + y * cc.cos_beta);
            J(p, comp.phase) = ca * cc.omega;
          }
        } else {
          const double dx = x - cc.cx;
          const double dy = y - cc.cy;
          const double r = std::sqrt(dx * dx + dy * dy);
          const double arg = cc.omega * r + cc.phase;
          s[c] = std::sin(arg);
          if constexpr (kWithJacobian) {
            const double ca = amps[c] * std::cos(arg);
            auto& J = *jacobian;
            J(p, comp.omega) = ca * r;
            J(p, comp.phase) = ca;
            if (comp.cx >= 0 && r > 0.0) {
              J(p, comp.cx) = -ca * cc.omega * dx / r;
              J(p, comp.cy) = -ca * cc.omega * dy / r;
            }
          }
        }
        f += amps[c] * s[c];
      }
      if constexpr (kWithJacobian) {
        for (int i = 0; i < lay.free_amplitudes; ++i) {
          (*jacobian)(p, i) = s[i] - s[n_comp - 1];
        }
      }
      raw(row, col) = f;
    }
  }
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::kSingleLinear: return "single_linear";
    case Family::kDoubleLinear: return "double_linear";
    case Family::kTripleLinear: return "triple_linear";
    case Family::kRadialLinear: return "radial_linear";
    case Family::kDoubleRadial: return "double_radial";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  const std::string key = normalized(name);
  for (Family f : kAllFamilies) {
    if (normalized(to_string(f)) == key) return f;
  }
  fail(ErrorCode::kInvalidArgument, "unknown image family '" + std::string(name) + "'");
}

int param_count(Family family) noexcept { return static_cast<int>(param_kinds(family).size()); }

std::span<const ParamKind> param_kinds(Family family) noexcept {
  switch (family) {
    case Family::kSingleLinear: return kSingleKinds;
    case Family::kDoubleLinear: return kDoubleKinds;
    case Family::kTripleLinear: return kTripleKinds;
    case Family::kRadialLinear: return kRadialLinearKinds;
    case Family::kDoubleRadial: return kDoubleRadialKinds;
  }
  return {};
}

std::vector<std::string> param_names(Family family) {
  switch (family) {
    case Family::kSingleLinear: return {"omega", "beta", "phi"};
    case Family::kDoubleLinear:
      return {"a1", "omega1", "beta1", "phi1", "omega2", "beta2", "phi2"};
    case Family::kTripleLinear:
      return {"a1",     "a2",    "omega1", "beta1", "phi1", "omega2",
              "beta2",  "phi2",  "omega3", "beta3", "phi3"};
    case Family::kRadialLinear: return {"a", "omega_r", "phi_r", "omega_l", "beta_l", "phi_l"};
    case Family::kDoubleRadial: return {"a1", "omega1", "phi1", "omega2", "phi2", "x0", "y0"};
  }
  return {};
}

void validate(const ParamVector& theta) {
  const int expected = param_count(theta.family);
  require(theta.values.size() == expected, ErrorCode::kInvalidArgument,
          std::string(to_string(theta.family)) + " expects " + std::to_string(expected) +
              " parameters, got " + std::to_string(theta.values.size()));
}

ParamBounds default_bounds(Family family, const GridSpec& grid) {
  const auto kinds = param_kinds(family);
  const double n_pix = grid.side;
  ParamBounds b{Eigen::VectorXd(kinds.size()), Eigen::VectorXd(kinds.size())};
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    switch (kinds[i]) {
      case ParamKind::kAmplitude:
        b.lower[i] = 0.0;
        b.upper[i] = 1.0;
        break;
      case ParamKind::kFrequency:
        b.lower[i] = 0.5 / n_pix;
        b.upper[i] = 4.0 / n_pix;
        break;
      case ParamKind::kAngle:
      case ParamKind::kLinearPhase:
      case ParamKind::kRadialPhase:
        b.lower[i] = -pi;
        b.upper[i] = pi;
        break;
      case ParamKind::kOffset:
        b.lower[i] = -grid.scale * n_pix / 2.0;
        b.upper[i] = grid.scale * n_pix / 2.0;
        break;
    }
  }
  return b;
}

bool within(const ParamVector& theta, const ParamBounds& bounds) noexcept {
  if (theta.values.size() != bounds.lower.size()) return false;
  if (((theta.values.array() < bounds.lower.array()) ||
       (theta.values.array() > bounds.upper.array()))
          .any()) {
    return false;
  }
  const Eigen::VectorXd amps = component_amplitudes(theta);
  return (amps.array() >= 0.0).all() && (amps.array() <= 1.0).all();
}

Eigen::VectorXd component_amplitudes(const ParamVector& theta) {
  const Layout& lay = layout(theta.family);
  const int n = static_cast<int>(lay.components.size());
  Eigen::VectorXd amps(n);
  double rest = 1.0;
  for (int i = 0; i < lay.free_amplitudes; ++i) {
    amps[i] = theta.values[i];
    rest -= theta.values[i];
  }
  amps[n - 1] = rest;
  return amps;
}

Grid JacobianStack::layer(int k) const {
  Grid out(side, side);
  Eigen::Map<Eigen::VectorXd>(out.data(), out.size()) = columns.col(k);
  return out;
}

RawImage eval_raw(const ParamVector& theta, const GridSpec& grid) {
  RawImage out;
  render_kernel<false>(theta, grid, out.values, nullptr);
  return out;
}

Transmittance to_transmittance(const RawImage& raw) {
  constexpr double kSlack = 1e-12;
  require((raw.values.abs() <= 1.0 + kSlack).all(), ErrorCode::kInvalidArgument,
          "raw image values must lie in [-1, 1]");
  return Transmittance{(0.5 * (1.0 + raw.values.max(-1.0).min(1.0))).eval()};
}

Transmittance render_unchecked(const ParamVector& theta, const GridSpec& grid) {
  Grid raw;
  render_kernel<false>(theta, grid, raw, nullptr);
  return Transmittance{(0.5 * (1.0 + raw)).eval()};
}

void render_with_jacobian(const ParamVector& theta, const GridSpec& grid, Grid& transmittance,
                          Eigen::MatrixXd& jacobian) {
  render_kernel<true>(theta, grid, transmittance, &jacobian);
  transmittance = 0.5 * (1.0 + transmittance);
  jacobian *= 0.5;
}

JacobianStack analytic_jacobian(const ParamVector& theta, const GridSpec& grid) {
  Grid t;
  JacobianStack out{grid.side, {}};
  render_with_jacobian(theta, grid, t, out.columns);
  return out;
}

ParamVector sample_params(Family family, const ParamBounds& bounds, std::uint64_t seed) {
  const int n = param_count(family);
  require(bounds.lower.size() == n && bounds.upper.size() == n, ErrorCode::kInvalidArgument,
          "bounds length does not match family");
  require((bounds.lower.array() < bounds.upper.array()).all(), ErrorCode::kInvalidArgument,
          "every lower bound must be below its upper bound");

  Rng rng(derive_seed(seed, Stream::kParams, 0));
  ParamVector theta{family, Eigen::VectorXd(n)};
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    for (int i = 0; i < n; ++i) theta.values[i] = rng.uniform(bounds.lower[i], bounds.upper[i]);
    const Eigen::VectorXd amps = component_amplitudes(theta);
    if ((amps.array() >= 0.0).all() && (amps.array() <= 1.0).all()) return theta;
  }
  fail(ErrorCode::kInvalidArgument, "amplitude bounds admit no valid amplitude split");
}

}  // namespace qlimits
