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

#include <benchmark/benchmark.h>

#include "qlimits/bounds.hpp"
#include "qlimits/estimators.hpp"
#include "qlimits/probe.hpp"

namespace {

using namespace qlimits;

ParamVector sample(Family f, const GridSpec& grid) {
  return sample_params(f, default_bounds(f, grid), 7);
}

void BM_AnalyticJacobian(benchmark::State& state) {
  const GridSpec grid = make_grid(64);
  const ParamVector theta = sample(static_cast<Family>(state.range(0)), grid);
  for (auto _ : state) benchmark::DoNotOptimize(analytic_jacobian(theta, grid));
  state.SetLabel(std::string(to_string(theta.family)));
}
BENCHMARK(BM_AnalyticJacobian)->DenseRange(0, 4);

void BM_QcrbMap(benchmark::State& state) {
  const GridSpec grid = make_grid(64, 3.141592653589793);
  ParamVector theta{Family::kTripleLinear, Eigen::VectorXd(11)};
  theta.values << 0.3228, 0.5577, 0.0596, -1.5376, -2.0554, 0.0625, -0.3372, 0.8890, 0.0305, 1.5550,
      -1.9764;
  const ProbeConfig probe = make_probe(grid, 1000.0);
  for (auto _ : state) {
    const JacobianStack dt = analytic_jacobian(theta, grid);
    benchmark::DoNotOptimize(variance_map_jacobian(dt, invert_fim(qfim(dt, probe))));
  }
}
BENCHMARK(BM_QcrbMap);

void BM_PoissonDraw(benchmark::State& state) {
  const double mean = static_cast<double>(state.range(0)) / 100.0;
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_poisson(mean, rng));
}
BENCHMARK(BM_PoissonDraw)->Arg(25)->Arg(100)->Arg(999)->Arg(2500)->Arg(100000);

void BM_Frame64(benchmark::State& state) {
  const ExpectedMap lam{Grid::Constant(64, 64, static_cast<double>(state.range(0)))};
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_frame(lam, frame_seed(3, i++)));
  state.SetItemsProcessed(state.iterations() * 64 * 64);
}
BENCHMARK(BM_Frame64)->Arg(1)->Arg(25);

void BM_MonteCarloMap(benchmark::State& state) {
  const GridSpec grid = make_grid(64);
  const ParamVector theta{Family::kSingleLinear, Eigen::Vector3d(0.04, 0.6, 0.4)};
  const JacobianStack dt = analytic_jacobian(theta, grid);
  const CovarianceBound sigma = invert_fim(qfim(dt, make_probe(grid, 1000.0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(variance_map_mc(theta, sigma, grid, {2048, 5, 1}));
  }
}
BENCHMARK(BM_MonteCarloMap)->Unit(benchmark::kMillisecond);

void BM_MlFitSingleLinear(benchmark::State& state) {
  const GridSpec grid = make_grid(64);
  const ParamVector theta{Family::kSingleLinear, Eigen::Vector3d(0.04, 0.6, 0.4)};
  const ProbeConfig probe = make_probe(grid, 4096.0);
  const ExpectedMap lam = expected_counts(render_unchecked(theta, grid), probe);
  std::uint64_t i = 0;
  for (auto _ : state) {
    state.PauseTiming();
    const Frame frame = sample_frame(lam, frame_seed(11, i++));
    state.ResumeTiming();
    benchmark::DoNotOptimize(ml_fit(frame, theta.family, probe));
  }
}
BENCHMARK(BM_MlFitSingleLinear)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
