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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qlimits/error.hpp"
#include "qlimits/grid.hpp"
#include "qlimits/image_models.hpp"
#include "qlimits/probe.hpp"

namespace qlimits {

enum class EstimatorKind { kPlugIn, kMaxLikelihood, kExternal };

std::string_view to_string(EstimatorKind kind) noexcept;
EstimatorKind parse_estimator_kind(std::string_view name);

struct MlConfig {
  int multistart = 8;
  int max_iterations = 200;
  double gradient_tolerance = 1e-9;  // on the projected NLL gradient, max-norm
  double initial_damping = 1e-3;
  double damping_increase = 10.0;
  double damping_decrease = 0.3;
  double max_damping = 1e12;
  double lambda_floor = 1e-12;       // inside ln(lambda) only
  double perturbation = 0.1;         // start jitter, fraction of the bound width
  std::uint64_t seed = 0x5EEDULL;

  /// Throws invalid-argument when any value is non-positive.
  void validate() const;
};

struct FitResult {
  ParamVector theta;
  bool converged = false;
  int iterations = 0;       // of the winning start
  double nll = 0.0;         // sum_p lambda_p - k_p ln lambda_p
  double gradient_norm = 0.0;
  int starts = 0;
  int converged_starts = 0;
  std::vector<std::string> wrapped;  // names of parameters reduced to their canonical range
};

/// Raised when no start converges. Carries the lowest-NLL partial fit.
class NonConvergenceError : public Error {
 public:
  explicit NonConvergenceError(FitResult best);
  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

/// Per-pixel inversion of expected_counts, clipped to [0, 1]:
/// T = k / (s alpha) (intensity-linear) or sqrt(k / (s alpha)) (amplitude-squared),
/// with s = n_bar / side^2. Pixels with zero illumination give 0.
Transmittance plugin_estimate(const Frame& frame, const ProbeConfig& probe);
Transmittance plugin_estimate(const Grid& counts, const ProbeConfig& probe);

/// DFT-based starting point for the likelihood fit.
///
/// The mean-subtracted counts are zero-padded to 4x the side and
/// transformed. The strongest off-DC bin gives omega (radius) and beta
/// (angle); the complex phase at that bin gives phi. Further components take
/// the next strongest peaks at least 8 padded bins away, and amplitudes
/// follow the peak magnitude ratios. Radial components come from a
/// least-squares periodogram of the azimuthal profile, about the origin for
/// the first one and about the residual's count centroid for the second
/// DoubleRadial ring. Throws init-failed when no off-DC bin exceeds 3x the
/// median power.
ParamVector spectral_init(const Grid& counts, Family family, const GridSpec& grid);

/// Reduces theta to the quotient space used for comparison and reporting:
/// negative frequencies are flipped, stripe angles folded into [-pi/2, pi/2)
/// (with phi -> pi/omega - phi, which renders the same image), radial phases
/// wrapped to [-pi, pi), linear phases wrapped by their image period
/// 2 pi / omega, and interchangeable components (DoubleLinear, TripleLinear)
/// sorted by omega.
/// `wrapped` (optional) receives the names of parameters that moved.
ParamVector canonicalize(const ParamVector& theta, std::vector<std::string>* wrapped = nullptr);

/// Poisson maximum-likelihood fit by damped Gauss-Newton (Fisher scoring)
/// over the analytic Jacobian of lambda, from `config.multistart` starts
/// (spectral init, jittered copies of it, uniform draws in the default
/// bounds). Amplitudes are kept on the simplex during the search. The best
/// converged start wins; if none converges NonConvergenceError is thrown.
/// `counts` may be real valued (noise-free oracle mode).
FitResult ml_fit(const Grid& counts, Family family, const ProbeConfig& probe,
                 const MlConfig& config = {});
FitResult ml_fit(const Frame& frame, Family family, const ProbeConfig& probe,
                 const MlConfig& config = {});

/// Poisson negative log-likelihood of the counts at theta (no ln k! term).
double poisson_nll(const Grid& counts, const ParamVector& theta, const ProbeConfig& probe,
                   double lambda_floor = 1e-12);

/// eval_raw followed by to_transmittance; the same rendering path as truth.
Transmittance reconstruct(const ParamVector& theta, const GridSpec& grid);

struct FrameFailure {
  std::size_t frame = 0;
  std::string message;
};

struct ReconstructionEnsemble {
  int side = 0;
  std::string provenance;
  std::vector<Grid> images;         // transmittance in [0, 1]
  std::vector<std::size_t> frames;  // source frame index of each image
  std::vector<FrameFailure> failures;
  std::vector<FitResult> fits;      // filled by parameter estimators only
  double clip_fraction = 0.0;       // fraction of loaded values clipped into [0, 1]
};

class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual EstimatorKind kind() const noexcept = 0;
  virtual std::string name() const = 0;

  struct Output {
    Transmittance image;
    std::optional<FitResult> fit;
    std::optional<std::string> failure;  // set when image is a best-effort fallback
  };
  /// `index` is the frame's position in its ensemble.
  virtual Output estimate(const Frame& frame, std::size_t index) const = 0;
};

class PlugInEstimator final : public Estimator {
 public:
  explicit PlugInEstimator(ProbeConfig probe) : probe_(std::move(probe)) {}
  EstimatorKind kind() const noexcept override { return EstimatorKind::kPlugIn; }
  std::string name() const override { return "plugin"; }
  Output estimate(const Frame& frame, std::size_t index) const override;

 private:
  ProbeConfig probe_;
};

/// Frame i is fitted with multistart seed derive_seed(config.seed, kMultistart, i).
/// A non-converged fit still yields the best partial reconstruction, flagged
/// as a failure.
class MaxLikelihoodEstimator final : public Estimator {
 public:
  MaxLikelihoodEstimator(Family family, ProbeConfig probe, MlConfig config = {});
  EstimatorKind kind() const noexcept override { return EstimatorKind::kMaxLikelihood; }
  std::string name() const override { return "ml"; }
  Output estimate(const Frame& frame, std::size_t index) const override;

 private:
  Family family_;
  ProbeConfig probe_;
  MlConfig config_;
};

/// One reconstruction per frame, in frame order. Per-frame failures go to
/// the failure ledger; frames that produced no image at all are absent from
/// `images` but listed in `failures`.
ReconstructionEnsemble run_ensemble(const Estimator& estimator, const FrameEnsemble& ensemble,
                                    int threads = 1);

/// Reads an IMGX reconstruction file (f32le or u32le), clipping values to
/// [0, 1] and recording the clipped fraction.
ReconstructionEnsemble load_external_reconstructions(const std::filesystem::path& path);

/// Writes images as IMGX f32le.
void write_ensemble(const ReconstructionEnsemble& ensemble, const std::filesystem::path& path);

/// Frames as IMGX u32le, and back. Per-frame seeds are not stored.
void write_frames(const FrameEnsemble& ensemble, const std::filesystem::path& path);
FrameEnsemble read_frames(const std::filesystem::path& path);

}  // namespace qlimits
