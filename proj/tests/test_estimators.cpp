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

#include <cmath>
#include <numbers>
#include <ostream>

#include <gtest/gtest.h>

#include "oracle_values.hpp"
#include "qlimits/estimators.hpp"
#include "qlimits/imgx.hpp"
#include "test_support.hpp"

namespace qlimits {

// Keeps parameterized test names readable in test listings.
void PrintTo(const ParamVector& theta, std::ostream* os) { *os << to_string(theta.family); }

namespace {

using testing::error_code_of;
using testing::TempDir;

constexpr double kPi = std::numbers::pi;

ParamVector make(Family f, std::initializer_list<double> v) {
  ParamVector theta{f, Eigen::VectorXd(static_cast<Eigen::Index>(v.size()))};
  Eigen::Index i = 0;
  for (double x : v) theta.values[i++] = x;
  return theta;
}

Grid noise_free_counts(const ParamVector& theta, const ProbeConfig& probe) {
  return expected_counts(render_unchecked(theta, probe.grid), probe).values;
}

TEST(PlugIn, InvertsEachConvention) {
  const GridSpec grid = make_grid(2);
  Grid counts(2, 2);
  counts << 0, 25, 100, 400;
  const auto lin = plugin_estimate(counts, make_probe(grid, 400.0, Convention::kIntensityLinear));
  EXPECT_DOUBLE_EQ(lin.values(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(lin.values(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(lin.values(1, 1), 1.0);  // clipped from 4
  const auto sq = plugin_estimate(counts, make_probe(grid, 400.0, Convention::kAmplitudeSquared));
  EXPECT_DOUBLE_EQ(sq.values(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(sq.values(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(sq.values(1, 1), 1.0);  // clipped from 2
}

TEST(PlugIn, DarkPixelsGiveZero) {
  const GridSpec grid = make_grid(2);
  Grid alpha = Grid::Ones(2, 2);
  alpha(0, 0) = 0.0;
  const auto t = plugin_estimate(Grid::Constant(2, 2, 3.0),
                                 make_probe(grid, 4.0, Convention::kIntensityLinear, alpha));
  EXPECT_DOUBLE_EQ(t.values(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(t.values(1, 1), 1.0);
}

TEST(PlugIn, AmplitudeVarianceAtQuarterPhotonMatchesEnumeration) {
  // lambda = 1/4 per pixel: the clipped estimate is 0 or 1, so its variance
  // is p (1 - p) with p = 1 - exp(-1/4), not the small-noise value 1/(4 s).
  const GridSpec grid = make_grid(8);
  const ProbeConfig probe = make_probe(grid, 64.0, Convention::kAmplitudeSquared);
  const ExpectedMap lam = expected_counts(Transmittance{Grid::Constant(8, 8, 0.5)}, probe);
  ASSERT_DOUBLE_EQ(lam.values(0, 0), 0.25);
  const PlugInEstimator est(probe);
  constexpr int kFrames = 20000;
  double s1 = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < kFrames; ++i) {
    const Frame f = sample_frame(lam, frame_seed(8, static_cast<std::uint64_t>(i)));
    const Grid t = est.estimate(f, static_cast<std::size_t>(i)).image.values;
    s1 += t.sum();
    s2 += t.square().sum();
  }
  const double n = 64.0 * kFrames;
  const double var = s2 / n - (s1 / n) * (s1 / n);
  const double exact = oracle::kPlugInClippedVarianceQuarter[0];
  EXPECT_NEAR(var, exact, 0.01 * exact);
  EXPECT_GT(std::abs(var - 0.25) / 0.25, 0.2);
}

TEST(Canonicalize, FlipsNegativeFrequency) {
  const GridSpec grid = make_grid(16);
  const ParamVector theta = make(Family::kSingleLinear, {-0.3, 0.2, 0.7});
  std::vector<std::string> wrapped;
  const ParamVector c = canonicalize(theta, &wrapped);
  EXPECT_GT(c.values[0], 0.0);
  EXPECT_FALSE(wrapped.empty());
  EXPECT_LT((render_unchecked(c, grid).values - render_unchecked(theta, grid).values).abs().maxCoeff(),
            1e-12);
}

TEST(Canonicalize, FoldsStripeAngleIntoHalfCircle) {
  const GridSpec grid = make_grid(16);
  const ParamVector theta = make(Family::kSingleLinear, {0.3, 2.5, 0.7});
  const ParamVector c = canonicalize(theta);
  EXPECT_GE(c.values[1], -kPi / 2);
  EXPECT_LT(c.values[1], kPi / 2);
  EXPECT_NEAR(c.values[1], 2.5 - kPi, 1e-15);
  EXPECT_LT((render_unchecked(c, grid).values - render_unchecked(theta, grid).values).abs().maxCoeff(),
            1e-12);
}

TEST(Canonicalize, WrapsPhasesByPeriod) {
  const ParamVector theta = make(Family::kSingleLinear, {0.5, 0.1, 0.3 + 3 * 2 * kPi / 0.5});
  const ParamVector c = canonicalize(theta);
  EXPECT_NEAR(c.values[2], 0.3, 1e-12);
  const ParamVector r = canonicalize(make(Family::kRadialLinear, {0.4, 0.1, 0.5 + 4 * kPi, 0.2, 0.3, 0.1}));
  EXPECT_NEAR(r.values[2], 0.5, 1e-12);
}

TEST(Canonicalize, SortsInterchangeableComponents) {
  const ParamVector a = make(Family::kDoubleLinear, {0.3, 0.2, 0.4, 1.0, 0.1, -0.3, 2.0});
  const ParamVector b = make(Family::kDoubleLinear, {0.7, 0.1, -0.3, 2.0, 0.2, 0.4, 1.0});
  const ParamVector ca = canonicalize(a);
  const ParamVector cb = canonicalize(b);
  EXPECT_LT((ca.values - cb.values).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(ca.values[1], ca.values[4]);
}

TEST(Canonicalize, IsIdempotent) {
  const GridSpec grid = make_grid(64);
  for (Family f : kAllFamilies) {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const ParamVector c = canonicalize(sample_params(f, default_bounds(f, grid), s));
      std::vector<std::string> wrapped;
      const ParamVector cc = canonicalize(c, &wrapped);
      EXPECT_LT((c.values - cc.values).cwiseAbs().maxCoeff(), 1e-12) << to_string(f);
      EXPECT_TRUE(wrapped.empty()) << to_string(f);
    }
  }
}

class NoiseFreeRecovery : public ::testing::TestWithParam<ParamVector> {};

TEST_P(NoiseFreeRecovery, FitReturnsTruth) {
  const ParamVector truth = GetParam();
  const GridSpec grid = make_grid(64);
  const ProbeConfig probe = make_probe(grid, 1.0e6);
  const FitResult fit = ml_fit(noise_free_counts(truth, probe), truth.family, probe);
  ASSERT_TRUE(fit.converged);
  const ParamVector want = canonicalize(truth);
  const ParamVector got = canonicalize(fit.theta);
  for (Eigen::Index k = 0; k < want.values.size(); ++k) {
    EXPECT_NEAR(got.values[k], want.values[k], 1e-6)
        << to_string(truth.family) << " " << param_names(truth.family)[static_cast<std::size_t>(k)];
  }
  const Grid diff = reconstruct(fit.theta, grid).values - render_unchecked(truth, grid).values;
  EXPECT_LT(diff.abs().maxCoeff(), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(
    Families, NoiseFreeRecovery,
    ::testing::Values(make(Family::kSingleLinear, {0.04, 0.6, 0.4}),
                      make(Family::kDoubleLinear, {0.6, 0.05, 0.3, 5.0, 0.02, -1.1, -12.0}),
                      make(Family::kTripleLinear,
                           {0.4, 0.35, 0.055, 0.2, 4.0, 0.03, 1.2, -9.0, 0.012, -0.8, 20.0}),
                      make(Family::kRadialLinear, {0.55, 0.05, 0.4, 0.03, 0.9, 7.0}),
                      make(Family::kDoubleRadial, {0.6, 0.05, 0.3, 0.035, -1.0, 8.0, -5.0})),
    [](const ::testing::TestParamInfo<ParamVector>& info) {
      std::string name(to_string(info.param.family));
      name.erase(std::remove(name.begin(), name.end(), '_'), name.end());
      return name;
    });

TEST(MlFit, NonConvergenceCarriesBestPartialFit) {
  const GridSpec grid = make_grid(32);
  const ProbeConfig probe = make_probe(grid, 1000.0);
  const ParamVector truth = make(Family::kDoubleLinear, {0.6, 0.1, 0.3, 1.0, 0.04, -1.1, 2.0});
  MlConfig config;
  config.max_iterations = 1;
  config.multistart = 3;
  try {
    ml_fit(noise_free_counts(truth, probe), truth.family, probe, config);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonConvergence);
    EXPECT_FALSE(e.best().converged);
    EXPECT_EQ(e.best().starts, 3);
    EXPECT_EQ(e.best().theta.values.size(), 7);
    EXPECT_TRUE(std::isfinite(e.best().nll));
  }
}

TEST(MlFit, ConfigValidation) {
  MlConfig c;
  c.multistart = 0;
  EXPECT_EQ(error_code_of([&] { c.validate(); }), ErrorCode::kInvalidArgument);
  EXPECT_NO_THROW(MlConfig{}.validate());
}

TEST(MlFit, SpectralInitFindsDominantFringe) {
  const GridSpec grid = make_grid(64);
  const ProbeConfig probe = make_probe(grid, 1.0e5);
  const ParamVector truth = make(Family::kSingleLinear, {0.045, 0.7, 3.0});
  const ParamVector init = spectral_init(noise_free_counts(truth, probe), truth.family, grid);
  // One padded DFT bin is 2 pi / (4 * 64) in frequency.
  EXPECT_NEAR(init.values[0], 0.045, 2 * kPi / 256);
  EXPECT_NEAR(std::remainder(init.values[1] - 0.7, kPi), 0.0, 0.2);
}

TEST(MlFit, SpectralInitRejectsFlatCounts) {
  const GridSpec grid = make_grid(16);
  EXPECT_EQ(error_code_of([&] { spectral_init(Grid::Constant(16, 16, 5.0), Family::kSingleLinear, grid); }),
            ErrorCode::kInitFailed);
}

TEST(MlFit, PoissonNllIsMinimalAtTruthForNoiseFreeCounts) {
  const GridSpec grid = make_grid(16);
  const ProbeConfig probe = make_probe(grid, 5000.0);
  const ParamVector truth = make(Family::kSingleLinear, {0.3, 0.2, 0.1});
  const Grid k = noise_free_counts(truth, probe);
  const double at = poisson_nll(k, truth, probe);
  for (int d = 0; d < 3; ++d) {
    ParamVector off = truth;
    off.values[d] += 1e-3;
    EXPECT_GT(poisson_nll(k, off, probe), at);
  }
}

TEST(Estimators, KindNames) {
  EXPECT_EQ(parse_estimator_kind("plugin"), EstimatorKind::kPlugIn);
  EXPECT_EQ(parse_estimator_kind("MLE"), EstimatorKind::kMaxLikelihood);
  EXPECT_EQ(parse_estimator_kind("unet"), EstimatorKind::kExternal);
  EXPECT_EQ(to_string(EstimatorKind::kMaxLikelihood), "ml");
  EXPECT_EQ(error_code_of([] { parse_estimator_kind("oracle"); }), ErrorCode::kInvalidArgument);
}

TEST(Estimators, EnsembleIsIndependentOfThreadCount) {
  const GridSpec grid = make_grid(32);
  const ProbeConfig probe = make_probe(grid, 4096.0);
  const ParamVector truth = make(Family::kSingleLinear, {0.15, 0.6, 0.4});
  const FrameEnsemble frames =
      sample_ensemble(expected_counts(render_unchecked(truth, grid), probe), 6, 77);
  MlConfig config;
  config.multistart = 3;
  const MaxLikelihoodEstimator est(truth.family, probe, config);
  const ReconstructionEnsemble a = run_ensemble(est, frames, 1);
  const ReconstructionEnsemble b = run_ensemble(est, frames, 3);
  ASSERT_EQ(a.images.size(), 6u);
  ASSERT_EQ(b.images.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_TRUE((a.images[i] == b.images[i]).all()) << "frame " << i;
    EXPECT_EQ(a.frames[i], i);
  }
  EXPECT_EQ(a.fits.size(), 6u);
  EXPECT_EQ(a.provenance, b.provenance);
}

TEST(Estimators, NonConvergedFramesAreFlaggedButKept) {
  const GridSpec grid = make_grid(16);
  const ProbeConfig probe = make_probe(grid, 500.0);
  const ParamVector truth = make(Family::kDoubleLinear, {0.6, 0.2, 0.3, 1.0, 0.1, -1.1, 2.0});
  const FrameEnsemble frames =
      sample_ensemble(expected_counts(render_unchecked(truth, grid), probe), 2, 3);
  MlConfig config;
  config.max_iterations = 1;
  config.multistart = 2;
  const ReconstructionEnsemble r =
      run_ensemble(MaxLikelihoodEstimator(truth.family, probe, config), frames);
  EXPECT_EQ(r.images.size(), 2u);
  EXPECT_EQ(r.failures.size(), 2u);
  for (const Grid& img : r.images) {
    EXPECT_GE(img.minCoeff(), 0.0);
    EXPECT_LE(img.maxCoeff(), 1.0);
  }
}

TEST(Estimators, FramesRoundTripThroughImgx) {
  TempDir dir;
  const FrameEnsemble e = sample_ensemble(ExpectedMap{Grid::Constant(4, 4, 3.0)}, 5, 12);
  write_frames(e, dir / "frames.imgx");
  const FrameEnsemble back = read_frames(dir / "frames.imgx");
  ASSERT_EQ(back.frames.size(), 5u);
  EXPECT_EQ(back.side, 4);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_TRUE((back.frames[i].counts == e.frames[i].counts).all());

  const std::vector<float> f(16, 0.5f);
  write_imgx(dir / "f.imgx", ImgxHeader{4, 4, 1}, f);
  EXPECT_EQ(error_code_of([&] { read_frames(dir / "f.imgx"); }), ErrorCode::kUnsupportedDtype);
}

TEST(Estimators, ExternalReconstructionsAreClipped) {
  TempDir dir;
  const std::vector<float> v{-0.5f, 0.25f, 0.5f, 1.5f, 0.0f, 1.0f, 0.75f, 0.1f};
  write_imgx(dir / "r.imgx", ImgxHeader{2, 2, 2}, v);
  const ReconstructionEnsemble r = load_external_reconstructions(dir / "r.imgx");
  ASSERT_EQ(r.images.size(), 2u);
  EXPECT_DOUBLE_EQ(r.images[0](0, 0), 0.0);
  EXPECT_DOUBLE_EQ(r.images[0](1, 1), 1.0);
  EXPECT_DOUBLE_EQ(r.images[1](1, 0), 0.75);
  EXPECT_DOUBLE_EQ(r.clip_fraction, 2.0 / 8.0);

  const std::vector<float> bad{0.1f, std::nanf(""), 0.2f, 0.3f};
  write_imgx(dir / "bad.imgx", ImgxHeader{2, 2, 1}, bad);
  EXPECT_EQ(error_code_of([&] { load_external_reconstructions(dir / "bad.imgx"); }),
            ErrorCode::kFormatError);
}

TEST(Estimators, EnsembleWritesAsFloatImgx) {
  TempDir dir;
  ReconstructionEnsemble r;
  r.side = 2;
  r.images = {Grid::Constant(2, 2, 0.25), Grid::Constant(2, 2, 0.5)};
  write_ensemble(r, dir / "e.imgx");
  const ImgxFile f = read_imgx(dir / "e.imgx");
  EXPECT_EQ(f.header.dtype, Dtype::kF32);
  EXPECT_EQ(f.header.frames, 2);
  EXPECT_FLOAT_EQ(f.f32[5], 0.5f);
}

}  // namespace
}  // namespace qlimits
