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

#include "qlimits/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "qlimits/imgx.hpp"
#include "qlimits/parallel.hpp"
#include "qlimits/rng.hpp"

namespace qlimits {

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::kPlugIn: return "plugin";
    case EstimatorKind::kMaxLikelihood: return "ml";
    case EstimatorKind::kExternal: return "external";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  std::string key;
  for (char c : name) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "plugin" || key == "plug-in" || key == "plug_in") return EstimatorKind::kPlugIn;
  if (key == "ml" || key == "mle" || key == "max_likelihood") return EstimatorKind::kMaxLikelihood;
  if (key == "external" || key == "unet") return EstimatorKind::kExternal;
  fail(ErrorCode::kInvalidArgument, "unknown estimator '" + std::string(name) + "'");
}

void MlConfig::validate() const {
  require(multistart >= 1 && max_iterations >= 1, ErrorCode::kInvalidArgument,
          "multistart and max_iterations must be at least 1");
  require(gradient_tolerance > 0.0 && initial_damping > 0.0 && damping_increase > 1.0 &&
              damping_decrease > 0.0 && damping_decrease < 1.0 && max_damping > initial_damping &&
              lambda_floor > 0.0 && perturbation >= 0.0,
          ErrorCode::kInvalidArgument, "likelihood fit settings out of range");
}

NonConvergenceError::NonConvergenceError(FitResult best)
    : Error(ErrorCode::kNonConvergence,
            "no likelihood start converged (best projected gradient " +
                std::to_string(best.gradient_norm) + ")"),
      best_(std::move(best)) {}

Transmittance plugin_estimate(const Grid& counts, const ProbeConfig& probe) {
  require_shape(counts, probe.grid, "counts");
  const double s = probe.photons_per_pixel();
  Grid t(probe.grid.side, probe.grid.side);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double gain = s * probe.illumination.data()[i];
    if (!(gain > 0.0)) {
      t.data()[i] = 0.0;
      continue;
    }
    const double ratio = counts.data()[i] / gain;
    const double value =
        probe.convention == Convention::kIntensityLinear ? ratio : std::sqrt(std::max(ratio, 0.0));
    t.data()[i] = std::clamp(value, 0.0, 1.0);
  }
  return Transmittance{std::move(t)};
}

Transmittance plugin_estimate(const Frame& frame, const ProbeConfig& probe) {
  return plugin_estimate(Grid(frame.counts.cast<double>()), probe);
}

Transmittance reconstruct(const ParamVector& theta, const GridSpec& grid) {
  return to_transmittance(eval_raw(theta, grid));
}

Estimator::Output PlugInEstimator::estimate(const Frame& frame, std::size_t) const {
  return Output{plugin_estimate(frame, probe_), std::nullopt, std::nullopt};
}

MaxLikelihoodEstimator::MaxLikelihoodEstimator(Family family, ProbeConfig probe, MlConfig config)
    : family_(family), probe_(std::move(probe)), config_(config) {
  config_.validate();
}

Estimator::Output MaxLikelihoodEstimator::estimate(const Frame& frame, std::size_t index) const {
  MlConfig config = config_;
  config.seed = derive_seed(config_.seed, Stream::kMultistart, index);
  try {
    FitResult fit = ml_fit(frame, family_, probe_, config);
    Transmittance image = render_unchecked(fit.theta, probe_.grid);
    image.values = image.values.cwiseMax(0.0).cwiseMin(1.0);
    return Output{std::move(image), std::move(fit), std::nullopt};
  } catch (const NonConvergenceError& e) {
    Transmittance image = render_unchecked(e.best().theta, probe_.grid);
    image.values = image.values.cwiseMax(0.0).cwiseMin(1.0);
    return Output{std::move(image), e.best(), std::string(e.what())};
  }
}

ReconstructionEnsemble run_ensemble(const Estimator& estimator, const FrameEnsemble& ensemble,
                                    int threads) {
  std::vector<std::optional<Estimator::Output>> outputs(ensemble.frames.size());
  std::vector<std::string> errors(ensemble.frames.size());
  parallel_for(ensemble.frames.size(), threads, [&](std::size_t i) {
    try {
      outputs[i] = estimator.estimate(ensemble.frames[i], i);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  ReconstructionEnsemble out;
  out.side = ensemble.side;
  out.provenance = estimator.name();
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (!outputs[i]) {
      out.failures.push_back(FrameFailure{i, errors[i]});
      continue;
    }
    auto& o = *outputs[i];
    out.images.push_back(std::move(o.image.values));
    out.frames.push_back(i);
    if (o.fit) out.fits.push_back(std::move(*o.fit));
    if (o.failure) out.failures.push_back(FrameFailure{i, std::move(*o.failure)});
  }
  return out;
}

ReconstructionEnsemble load_external_reconstructions(const std::filesystem::path& path) {
  const ImgxFile file = read_imgx(path);
  const ImgxHeader& h = file.header;
  require(h.height == h.width && h.height > 0 && h.frames > 0, ErrorCode::kDimensionMismatch,
          "reconstructions must be square and non-empty");
  ReconstructionEnsemble out;
  out.side = h.height;
  out.provenance = "external:" + path.filename().string();
  const std::size_t per_frame = static_cast<std::size_t>(h.height) * h.width;
  std::size_t clipped = 0;
  for (int f = 0; f < h.frames; ++f) {
    Grid img(h.height, h.width);
    for (std::size_t i = 0; i < per_frame; ++i) {
      const std::size_t k = f * per_frame + i;
      const double v = h.dtype == Dtype::kF32 ? static_cast<double>(file.f32[k])
                                              : static_cast<double>(file.u32[k]);
      if (!std::isfinite(v)) {
        fail(ErrorCode::kFormatError, "non-finite value in reconstruction frame " + std::to_string(f));
      }
      if (v < 0.0 || v > 1.0) ++clipped;
      img.data()[i] = std::clamp(v, 0.0, 1.0);
    }
    out.images.push_back(std::move(img));
    out.frames.push_back(static_cast<std::size_t>(f));
  }
  out.clip_fraction = static_cast<double>(clipped) / static_cast<double>(h.value_count());
  return out;
}

void write_ensemble(const ReconstructionEnsemble& ensemble, const std::filesystem::path& path) {
  require(!ensemble.images.empty(), ErrorCode::kInvalidArgument, "no images to write");
  const int side = static_cast<int>(ensemble.images.front().rows());
  std::vector<float> values;
  values.reserve(ensemble.images.size() * side * side);
  for (const Grid& img : ensemble.images) {
    require(img.rows() == side && img.cols() == side, ErrorCode::kDimensionMismatch,
            "images in one ensemble must share a size");
    for (Eigen::Index i = 0; i < img.size(); ++i) values.push_back(static_cast<float>(img.data()[i]));
  }
  write_imgx(path, ImgxHeader{side, side, static_cast<int>(ensemble.images.size()), Dtype::kF32},
             values);
}

void write_frames(const FrameEnsemble& ensemble, const std::filesystem::path& path) {
  require(!ensemble.frames.empty(), ErrorCode::kInvalidArgument, "no frames to write");
  const int side = ensemble.side;
  std::vector<std::uint32_t> values;
  values.reserve(ensemble.frames.size() * side * side);
  for (const Frame& f : ensemble.frames) {
    require(f.counts.rows() == side && f.counts.cols() == side, ErrorCode::kDimensionMismatch,
            "frame size does not match ensemble side");
    values.insert(values.end(), f.counts.data(), f.counts.data() + f.counts.size());
  }
  write_imgx(path, ImgxHeader{side, side, static_cast<int>(ensemble.frames.size()), Dtype::kU32},
             values);
}

FrameEnsemble read_frames(const std::filesystem::path& path) {
  const ImgxFile file = read_imgx(path);
  const ImgxHeader& h = file.header;
  require(h.dtype == Dtype::kU32, ErrorCode::kUnsupportedDtype, "count frames must be u32le");
  require(h.height == h.width, ErrorCode::kDimensionMismatch, "count frames must be square");
  FrameEnsemble out{h.height, 0, {}};
  const std::size_t per_frame = static_cast<std::size_t>(h.height) * h.width;
  for (int f = 0; f < h.frames; ++f) {
    Frame frame{CountGrid(h.height, h.width), 0};
    std::copy_n(file.u32.begin() + static_cast<std::ptrdiff_t>(f * per_frame), per_frame,
                frame.counts.data());
    out.frames.push_back(std::move(frame));
  }
  return out;
}

}  // namespace qlimits
