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
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Cholesky>
#include <unsupported/Eigen/FFT>

#include "qlimits/error.hpp"
#include "qlimits/estimators.hpp"

namespace qlimits {

namespace {

using std::numbers::pi;
using Complex = std::complex<double>;

constexpr int kPadFactor = 4;
constexpr double kPeakToMedian = 3.0;
constexpr int kExclusionNativeBins = 2;
constexpr int kRadialScanSteps = 256;

double wrap_pi(double x) { return x - 2.0 * pi * std::floor((x + pi) / (2.0 * pi)); }

struct Spectrum {
  int size = 0;                 // padded side
  std::vector<Complex> values;  // row-major, size x size
  const Complex& at(int ky, int kx) const {
    const int r = (ky % size + size) % size;
    const int c = (kx % size + size) % size;
    return values[static_cast<std::size_t>(r) * size + c];
  }
};

Spectrum padded_dft(const Grid& z) {
  const int side = static_cast<int>(z.rows());
  const int n = kPadFactor * side;
  Eigen::FFT<double> fft;
  Spectrum spec{n, std::vector<Complex>(static_cast<std::size_t>(n) * n)};

  std::vector<double> row_in(n, 0.0);
  std::vector<Complex> row_out;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) row_in[c] = z(r, c);
    fft.fwd(row_out, row_in);
    std::copy(row_out.begin(), row_out.end(), spec.values.begin() + static_cast<std::ptrdiff_t>(r) * n);
  }
  std::vector<Complex> col_in(n), col_out;
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) col_in[r] = spec.values[static_cast<std::size_t>(r) * n + c];
    fft.fwd(col_out, col_in);
    for (int r = 0; r < n; ++r) spec.values[static_cast<std::size_t>(r) * n + c] = col_out[r];
  }
  return spec;
}

struct Peak {
  int kx = 0;
  int ky = 0;
  double power = 0.0;
};

int signed_bin(int k, int n) { return k < n / 2 ? k : k - n; }

// Strongest bins, each at least `exclusion` padded bins away from earlier
// picks and their Hermitian twins.
std::vector<Peak> find_peaks(const Spectrum& spec, int count, int exclusion) {
  const int n = spec.size;
  std::vector<Peak> peaks;
  for (int pick = 0; pick < count; ++pick) {
    Peak best{0, 0, -1.0};
    for (int r = 0; r < n; ++r) {
      const int ky = signed_bin(r, n);
      for (int c = 0; c < n; ++c) {
        const int kx = signed_bin(c, n);
        if (kx == 0 && ky == 0) continue;
        bool excluded = false;
        for (const Peak& p : peaks) {
          const int d1 = (kx - p.kx) * (kx - p.kx) + (ky - p.ky) * (ky - p.ky);
          const int d2 = (kx + p.kx) * (kx + p.kx) + (ky + p.ky) * (ky + p.ky);
          if (d1 <= exclusion * exclusion || d2 <= exclusion * exclusion) {
            excluded = true;
            break;
          }
        }
        if (excluded) continue;
        const double pw = std::norm(spec.values[static_cast<std::size_t>(r) * n + c]);
        if (pw > best.power) best = Peak{kx, ky, pw};
      }
    }
    if (best.power < 0.0) break;
    peaks.push_back(best);
  }
  return peaks;
}

double median_power(const Spectrum& spec) {
  std::vector<double> power;
  power.reserve(spec.values.size() - 1);
  for (std::size_t i = 1; i < spec.values.size(); ++i) power.push_back(std::norm(spec.values[i]));
  const auto mid = power.begin() + static_cast<std::ptrdiff_t>(power.size() / 2);
  std::nth_element(power.begin(), mid, power.end());
  return *mid;
}

struct LinearGuess {
  double omega = 0.0;
  double beta = 0.0;
  double phi = 0.0;
  double magnitude = 0.0;
};

// Converts a DFT bin into (omega, beta, phi). Both the bin and its twin are
// considered; the one implying the smaller phase offset omega * phi wins.
LinearGuess linear_from_peak(const Spectrum& spec, const Peak& peak, const GridSpec& grid) {
  const int n = spec.size;
  const double half = grid.side / 2;
  LinearGuess best;
  double best_psi = 1e300;
  for (int sign : {1, -1}) {
    const int kx = sign * peak.kx;
    const int ky = sign * peak.ky;
    const Complex f = spec.at(ky, kx);
    const double psi = wrap_pi(std::arg(f) + pi / 2.0 + 2.0 * pi * (kx + ky) * half / n);
    if (std::abs(psi) < best_psi) {
      best_psi = std::abs(psi);
      const double omega = 2.0 * pi * std::hypot(kx, ky) / (n * grid.scale);
      best = LinearGuess{omega, std::atan2(ky, kx), omega > 0.0 ? psi / omega : 0.0,
                         std::abs(f)};
    }
  }
  return best;
}

struct RadialGuess {
  double omega = 0.0;
  double phi = 0.0;
  double magnitude = 0.0;
};

// Least-squares periodogram of the azimuthal profile around (cx, cy): for
// each trial omega fit c + A sin(omega r) + B cos(omega r) and keep the
// omega explaining the most variance.
RadialGuess radial_periodogram(const Grid& z, const GridSpec& grid, double cx, double cy) {
  const int side = grid.side;
  const int bins = static_cast<int>(std::ceil(std::sqrt(2.0) * side)) + 2;
  std::vector<double> sum(bins, 0.0), weight(bins, 0.0);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const double rad = std::hypot(grid.x(c) - cx, grid.y(r) - cy) / grid.scale;
      const int b = std::min(bins - 1, static_cast<int>(std::lround(rad)));
      sum[b] += z(r, c);
      weight[b] += 1.0;
    }
  }
  RadialGuess best;
  double best_explained = -1.0;
  const double lo = 0.25 / side;
  const double hi = 8.0 / side;
  for (int step = 0; step <= kRadialScanSteps; ++step) {
    const double omega_px = lo + (hi - lo) * step / kRadialScanSteps;
    Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    double total = 0.0;
    for (int b = 0; b < bins; ++b) {
      if (weight[b] == 0.0) continue;
      const double mean = sum[b] / weight[b];
      const Eigen::Vector3d basis(1.0, std::sin(omega_px * b), std::cos(omega_px * b));
      normal += weight[b] * basis * basis.transpose();
      rhs += weight[b] * mean * basis;
      total += weight[b] * mean * mean;
    }
    const Eigen::Vector3d coef = normal.ldlt().solve(rhs);
    const double explained = coef.dot(rhs) - (rhs[0] * rhs[0]) / normal(0, 0);
    if (total > 0.0 && explained > best_explained) {
      best_explained = explained;
      const double amp = std::hypot(coef[1], coef[2]);
      // A sin + B cos = amp sin(omega r + phi) with phi = atan2(B, A).
      best = RadialGuess{omega_px / grid.scale, std::atan2(coef[2], coef[1]), amp};
    }
  }
  return best;
}

Grid subtract_radial(const Grid& z, const GridSpec& grid, const RadialGuess& g, double cx,
                     double cy) {
  Grid out = z;
  for (int r = 0; r < grid.side; ++r) {
    for (int c = 0; c < grid.side; ++c) {
      const double rad = std::hypot(grid.x(c) - cx, grid.y(r) - cy);
      out(r, c) -= g.magnitude * std::sin(g.omega * rad + g.phi);
    }
  }
  return out;
}

void check_power(const Spectrum& spec, const std::vector<Peak>& peaks) {
  const double median = median_power(spec);
  require(!peaks.empty() && peaks.front().power > kPeakToMedian * median &&
              peaks.front().power > 0.0,
          ErrorCode::kInitFailed, "no off-DC spectral peak above 3x the median power");
}

}  // namespace

ParamVector spectral_init(const Grid& counts, Family family, const GridSpec& grid) {
  require_shape(counts, grid, "frame");
  const Grid z = counts - counts.mean();
  const int exclusion = kExclusionNativeBins * kPadFactor;
  const ParamBounds bounds = default_bounds(family, grid);
  ParamVector theta{family, Eigen::VectorXd::Zero(param_count(family))};
  auto& v = theta.values;

  switch (family) {
    case Family::kSingleLinear:
    case Family::kDoubleLinear:
    case Family::kTripleLinear: {
      const int comps = family == Family::kSingleLinear ? 1
                        : family == Family::kDoubleLinear ? 2
                                                          : 3;
      const Spectrum spec = padded_dft(z);
      const std::vector<Peak> peaks = find_peaks(spec, comps, exclusion);
      check_power(spec, peaks);
      std::vector<LinearGuess> guesses;
      for (int i = 0; i < comps; ++i) {
        guesses.push_back(i < static_cast<int>(peaks.size()) ? linear_from_peak(spec, peaks[i], grid)
                                                            : guesses.front());
      }
      double mag_total = 0.0;
      for (const auto& g : guesses) mag_total += g.magnitude;
      const int free = comps - 1;
      for (int i = 0; i < free; ++i) v[i] = mag_total > 0.0 ? guesses[i].magnitude / mag_total : 1.0 / comps;
      for (int i = 0; i < comps; ++i) {
        v[free + 3 * i] = guesses[i].omega;
        v[free + 3 * i + 1] = guesses[i].beta;
        v[free + 3 * i + 2] = guesses[i].phi;
      }
      break;
    }
    case Family::kRadialLinear: {
      const RadialGuess rad = radial_periodogram(z, grid, 0.0, 0.0);
      const Grid residual = subtract_radial(z, grid, rad, 0.0, 0.0);
      const Spectrum spec = padded_dft(residual);
      const std::vector<Peak> peaks = find_peaks(spec, 1, exclusion);
      check_power(padded_dft(z), find_peaks(padded_dft(z), 1, exclusion));
      LinearGuess lin;
      if (!peaks.empty() && peaks.front().power > 0.0) lin = linear_from_peak(spec, peaks.front(), grid);
      const double lin_amp = lin.magnitude / (static_cast<double>(grid.pixel_count()) / 2.0);
      v[0] = rad.magnitude + lin_amp > 0.0 ? rad.magnitude / (rad.magnitude + lin_amp) : 0.5;
      v[1] = rad.omega;
      v[2] = rad.phi;
      v[3] = lin.omega;
      v[4] = lin.beta;
      v[5] = lin.phi;
      break;
    }
    case Family::kDoubleRadial: {
      const Spectrum spec = padded_dft(z);
      check_power(spec, find_peaks(spec, 1, exclusion));
      const RadialGuess first = radial_periodogram(z, grid, 0.0, 0.0);
      const Grid residual = subtract_radial(z, grid, first, 0.0, 0.0);
      const double total = counts.sum();
      double cx = 0.0;
      double cy = 0.0;
      if (total > 0.0) {
        for (int r = 0; r < grid.side; ++r) {
          for (int c = 0; c < grid.side; ++c) {
            cx += counts(r, c) * grid.x(c);
            cy += counts(r, c) * grid.y(r);
          }
        }
        cx /= total;
        cy /= total;
      }
      const RadialGuess second = radial_periodogram(residual, grid, cx, cy);
      const double mags = first.magnitude + second.magnitude;
      v[0] = mags > 0.0 ? first.magnitude / mags : 0.5;
      v[1] = first.omega;
      v[2] = first.phi;
      v[3] = second.omega;
      v[4] = second.phi;
      v[5] = cx;
      v[6] = cy;
      break;
    }
  }
  // Keep the start inside the sampling box; phases are left free.
  const auto kinds = param_kinds(family);
  for (int i = 0; i < v.size(); ++i) {
    if (kinds[i] == ParamKind::kAmplitude || kinds[i] == ParamKind::kFrequency ||
        kinds[i] == ParamKind::kOffset) {
      v[i] = std::clamp(v[i], bounds.lower[i], bounds.upper[i]);
    }
  }
  if (family == Family::kTripleLinear && v[0] + v[1] > 1.0) {
    const double s = v[0] + v[1];
    v[0] /= s;
    v[1] /= s;
  }
  return theta;
}

}  // namespace qlimits
