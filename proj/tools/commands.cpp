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

#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "qlimits/bounds.hpp"
#include "qlimits/csv.hpp"
#include "qlimits/error.hpp"
#include "qlimits/estimators.hpp"
#include "qlimits/evaluation.hpp"
#include "qlimits/image_models.hpp"
#include "qlimits/imgx.hpp"
#include "qlimits/probe.hpp"
#include "qlimits/raster.hpp"
#include "qlimits/report.hpp"
#include "qlimits/rng.hpp"

namespace qlimits::cli {

namespace fs = std::filesystem;

namespace {

// Collects every output path of a command up front, so that a run either
// refuses before touching anything or is free to write all of them.
class Outputs {
 public:
  Outputs(bool force) : force_(force) {}

  fs::path claim(const fs::path& path) {
    if (!force_ && fs::exists(path)) {
      throw UsageError("refusing to overwrite " + path.string() + " (pass --force)");
    }
    return path;
  }

 private:
  bool force_;
};

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

std::string label(double n_bar) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", n_bar);
  return buf;
}

GridSpec grid_of(const RunConfig& c) { return make_grid(c.integer("side"), c.number("scale")); }

ProbeConfig probe_of(const RunConfig& c, const GridSpec& grid, double n_bar) {
  return make_probe(grid, n_bar, parse_convention(c.str("convention")));
}

std::vector<double> n_bar_points(const RunConfig& c) {
  std::vector<double> list = c.numbers("n_bar_list");
  if (list.empty()) list.push_back(c.number("n_bar"));
  return list;
}

struct Truth {
  std::string family;
  std::optional<ParamVector> theta;
  Transmittance image;
};

Truth resolve_truth(const RunConfig& c, const GridSpec& grid) {
  if (!c.str("theta").empty()) {
    const std::vector<double> v = c.numbers("theta");
    ParamVector theta{parse_family(c.str("family")),
                      Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))};
    validate(theta);
    return {std::string(to_string(theta.family)), theta, reconstruct(theta, grid)};
  }
  if (!c.str("truth").empty()) {
    const fs::path path = c.str("truth");
    if (!fs::exists(path)) throw UsageError("truth file not found: " + path.string());
    if (path.extension() == ".json") {
      const ParamVector theta = theta_from_json(read_json(path));
      return {std::string(to_string(theta.family)), theta, reconstruct(theta, grid)};
    }
    return {"raster", std::nullopt, load_raster(path, grid)};
  }
  const Family family = parse_family(c.str("family"));
  const ParamVector theta = sample_params(family, default_bounds(family, grid), c.u64("seed"));
  return {std::string(to_string(family)), theta, reconstruct(theta, grid)};
}

void write_truth(Outputs& outs, const fs::path& dir, const Truth& truth) {
  const Grid& t = truth.image.values;
  std::vector<float> values(t.data(), t.data() + t.size());
  write_imgx(outs.claim(dir / "truth.imgx"),
             ImgxHeader{static_cast<int>(t.rows()), static_cast<int>(t.cols()), 1, Dtype::kF32},
             values);
  if (truth.theta) write_json(outs.claim(dir / "theta.json"), theta_to_json(*truth.theta));
}

struct BoundsResult {
  std::optional<FisherMatrix> fisher;
  std::optional<CovarianceBound> sigma;
  std::vector<VarianceMap> maps;
};

BoundsResult compute_bounds(const Truth& truth, const ProbeConfig& probe, const RunConfig& c,
                            std::uint64_t seed, int threads) {
  BoundsResult r;
  const ExpectedMap lambda = expected_counts(truth.image, probe);
  if (truth.theta) {
    const JacobianStack j = analytic_jacobian(*truth.theta, probe.grid);
    r.fisher = qfim(j, probe);
    r.sigma = invert_fim(*r.fisher);
    r.maps.push_back(variance_map_jacobian(j, *r.sigma));
    const int samples = c.integer("mc_samples");
    if (samples > 0) {
      MonteCarloOptions mc{samples, derive_seed(seed, Stream::kMonteCarlo, 0), threads};
      r.maps.push_back(variance_map_mc(*truth.theta, *r.sigma, probe.grid, mc));
    }
  }
  r.maps.push_back(sql_map(lambda));
  r.maps.push_back(hl_map(lambda));
  r.maps.push_back(sql_map_transmittance(lambda, truth.image, probe));
  r.maps.push_back(hl_map_transmittance(lambda, truth.image, probe));
  return r;
}

std::vector<std::string> bound_files(const Truth& truth, const RunConfig& c) {
  std::vector<std::string> files = {"sql.csv", "hl.csv", "sql_t.csv", "hl_t.csv", "bounds.json"};
  if (truth.theta) {
    files.insert(files.end(), {"fisher.csv", "covariance.csv", "qcrb_j.csv"});
    if (c.integer("mc_samples") > 0) files.push_back("qcrb_mc.csv");
  }
  return files;
}

void write_bounds(const fs::path& dir, const BoundsResult& r, const Truth& truth,
                  const ProbeConfig& probe) {
  nlohmann::ordered_json j;
  j["truth_family"] = truth.family;
  j["n_bar"] = probe.n_bar;
  j["convention"] = to_string(probe.convention);
  if (r.fisher) {
    write_csv(dir / "fisher.csv", r.fisher->values);
    write_csv(dir / "covariance.csv", r.sigma->values);
    const auto& ev = r.sigma->conditioning.eigenvalues;
    j["fisher_eigenvalues"] = std::vector<double>(ev.data(), ev.data() + ev.size());
  }
  for (const VarianceMap& m : r.maps) {
    const std::string name(to_string(m.kind));
    write_csv(dir / (name + ".csv"), m.values);
    j["totals"][name] = std::isfinite(m.total) ? nlohmann::ordered_json(m.total) : nlohmann::ordered_json(nullptr);
    if (m.excluded_pixels > 0) j["excluded_pixels"][name] = m.excluded_pixels;
    if (m.kind == MapKind::kQcrbMonteCarlo) j["mc_jitter"] = m.jitter;
  }
  j["units"] = {{"qcrb_j", "transmittance^2"}, {"qcrb_mc", "transmittance^2"},
                {"sql", "counts^2"},           {"hl", "counts^2"},
                {"sql_t", "transmittance^2"},  {"hl_t", "transmittance^2"}};
  write_json(dir / "bounds.json", j);
}

std::unique_ptr<Estimator> make_estimator(const RunConfig& c, const Truth& truth,
                                          const ProbeConfig& probe, std::uint64_t seed) {
  switch (parse_estimator_kind(c.str("estimator"))) {
    case EstimatorKind::kPlugIn: return std::make_unique<PlugInEstimator>(probe);
    case EstimatorKind::kMaxLikelihood: {
      const Family family = truth.theta ? truth.theta->family : parse_family(c.str("family"));
      MlConfig ml;
      ml.multistart = c.integer("multistart");
      ml.max_iterations = c.integer("max_iterations");
      ml.seed = derive_seed(seed, Stream::kMultistart, 0);
      return std::make_unique<MaxLikelihoodEstimator>(family, probe, ml);
    }
    case EstimatorKind::kExternal: break;
  }
  throw UsageError("estimator 'external' has no estimate step; pass the file as "
                   "'reconstructions' to evaluate");
}

void write_fits(const fs::path& path, const ReconstructionEnsemble& recons) {
  nlohmann::ordered_json j;
  j["estimator"] = recons.provenance;
  j["frames"] = recons.frames.size();
  nlohmann::ordered_json fits = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < recons.fits.size(); ++i) {
    const FitResult& f = recons.fits[i];
    nlohmann::ordered_json e;
    e["frame"] = recons.frames[i];
    e["theta"] = theta_to_json(f.theta)["values"];
    e["converged"] = f.converged;
    e["iterations"] = f.iterations;
    e["nll"] = f.nll;
    e["gradient_norm"] = f.gradient_norm;
    e["converged_starts"] = f.converged_starts;
    e["wrapped"] = f.wrapped;
    fits.push_back(std::move(e));
  }
  j["fits"] = std::move(fits);
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const FrameFailure& f : recons.failures) {
    failures.push_back({{"frame", f.frame}, {"message", f.message}});
  }
  j["failures"] = std::move(failures);
  write_json(path, j);
}

const std::vector<std::string> kEvaluationFiles = {"report.json", "mse.csv", "bias_sq.csv",
                                                   "variance.csv", "histogram.csv"};

EvaluationReport evaluate_and_write(const fs::path& dir, const Truth& truth,
                                    const ReconstructionEnsemble& recons, const BoundsResult& bounds,
                                    const ProbeConfig& probe, const RunConfig& c) {
  EvaluationReport report = evaluate(recons, truth.image);
  compare_bounds(report, bounds.maps);

  // An empty histogram_pixel selects the grid center.
  std::vector<double> px = c.numbers("histogram_pixel");
  if (px.empty()) px = {static_cast<double>(recons.side / 2), static_cast<double>(recons.side / 2)};
  if (px.size() != 2) throw UsageError("histogram_pixel must be 'row,col'");
  const NormalityDiagnostic hist = pixel_histogram(recons, static_cast<int>(px[0]),
                                                   static_cast<int>(px[1]),
                                                   c.integer("histogram_bins"));

  write_csv(dir / "mse.csv", report.mse_map);
  if (report.bias_sq_map.size() > 0) {
    write_csv(dir / "bias_sq.csv", report.bias_sq_map);
    write_csv(dir / "variance.csv", report.variance_map);
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    rows.push_back({format_number(hist.edges[b]), format_number(hist.edges[b + 1]),
                    std::to_string(hist.counts[b])});
  }
  write_table(dir / "histogram.csv", {"lower", "upper", "count"}, rows);

  ReportInputs in;
  in.truth_family = truth.family;
  in.theta = truth.theta;
  in.n_bar = probe.n_bar;
  in.convention = probe.convention;
  in.estimator = recons.provenance;
  in.evaluation = &report;
  in.bounds = bounds.maps;
  in.failures = recons.failures.size();
  in.clip_fraction = recons.clip_fraction;
  in.maps = {{"mse", "mse.csv"}, {"histogram", "histogram.csv"}};
  if (report.bias_sq_map.size() > 0) {
    in.maps["bias_sq"] = "bias_sq.csv";
    in.maps["variance"] = "variance.csv";
  }
  nlohmann::ordered_json j = build_report(in);
  j["normality"] = {{"pixel", {hist.row, hist.col}},
                    {"mean", hist.mean},
                    {"sigma", hist.sigma},
                    {"degenerate", hist.degenerate},
                    {"reduced_chi2", std::isfinite(hist.goodness) ? nlohmann::ordered_json(hist.goodness) : nlohmann::ordered_json(nullptr)}};
  write_json(dir / "report.json", j);
  return report;
}

void print_totals(const EvaluationReport& report, double n_bar) {
  std::cout << "n_bar " << label(n_bar) << ": total MSE " << format_number(report.total_mse);
  for (const BoundRatio& r : report.ratios) {
    std::cout << ", mse/" << to_string(r.bound) << " " << format_number(r.ratio);
  }
  std::cout << '\n';
}

void write_resolved(Outputs& outs, const Context& ctx, const std::string& command) {
  write_text(outs.claim(ctx.out / (command + ".resolved.cfg")), ctx.config.resolved());
}

}  // namespace

void cmd_generate(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const GridSpec grid = grid_of(c);
  const int count = c.integer("count");
  if (count < 1) throw UsageError("count must be at least 1");
  make_dir(ctx.out);
  Outputs outs(ctx.force);

  if (count == 1) {
    const Truth truth = resolve_truth(c, grid);
    outs.claim(ctx.out / "truth.imgx");
    if (truth.theta) outs.claim(ctx.out / "theta.json");
    outs.claim(ctx.out / "generate.resolved.cfg");
    write_truth(outs, ctx.out, truth);
    write_resolved(outs, ctx, "generate");
    std::cout << "wrote truth (" << truth.family << ") to " << ctx.out.string() << '\n';
    return;
  }

  // Dataset mode: image i has its own parameter, photon-number and frame seeds.
  if (!c.str("theta").empty() || !c.str("truth").empty()) {
    throw UsageError("count > 1 samples its own truths; drop 'theta' and 'truth'");
  }
  const std::vector<double> range = c.numbers("n_bar_range");
  if (range.size() != 2 || !(range[0] > 0.0) || range[1] < range[0]) {
    throw UsageError("n_bar_range must be 'low,high' with 0 < low <= high");
  }
  const Family family = parse_family(c.str("family"));
  const ParamBounds bounds = default_bounds(family, grid);
  const std::uint64_t seed = c.u64("seed");
  const Convention convention = parse_convention(c.str("convention"));

  ImgxHeader header{grid.side, grid.side, count, Dtype::kF32};
  ImgxWriter truths(outs.claim(ctx.out / "truth.imgx"), header);
  header.dtype = Dtype::kU32;
  ImgxWriter frames(outs.claim(ctx.out / "frames.imgx"), header);
  const fs::path index_path = outs.claim(ctx.out / "dataset.json");
  outs.claim(ctx.out / "generate.resolved.cfg");

  nlohmann::ordered_json index = nlohmann::ordered_json::array();
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = derive_seed(seed, Stream::kDataset, static_cast<std::uint64_t>(i));
    const ParamVector theta = sample_params(family, bounds, s);
    Rng rng(derive_seed(s, Stream::kDataset, 0));
    const double n_bar = rng.uniform(range[0], range[1]);
    const Transmittance t = reconstruct(theta, grid);
    const Frame frame = sample_frame(expected_counts(t, make_probe(grid, n_bar, convention)),
                                     frame_seed(s, 0));
    const std::vector<float> tv(t.values.data(), t.values.data() + t.values.size());
    truths.append(tv);
    frames.append(std::span<const std::uint32_t>(frame.counts.data(), frame.counts.size()));
    index.push_back({{"index", i}, {"n_bar", n_bar}, {"theta", theta_to_json(theta)["values"]}});
  }
  truths.close();
  frames.close();
  write_json(index_path, nlohmann::ordered_json{{"family", to_string(family)},
                                                {"convention", to_string(convention)},
                                                {"images", std::move(index)}});
  write_resolved(outs, ctx, "generate");
  std::cout << "wrote " << count << " truth/frame pairs to " << ctx.out.string() << '\n';
}

void cmd_simulate(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const int count = c.integer("frames");
  if (count < 1) throw UsageError("frames must be at least 1");
  const GridSpec grid = grid_of(c);
  const Truth truth = resolve_truth(c, grid);
  const ProbeConfig probe = probe_of(c, grid, c.number("n_bar"));
  make_dir(ctx.out);
  Outputs outs(ctx.force);
  const fs::path path = outs.claim(ctx.out / "frames.imgx");
  outs.claim(ctx.out / "simulate.resolved.cfg");

  const FrameEnsemble frames =
      sample_ensemble(expected_counts(truth.image, probe), count, c.u64("seed"), ctx.threads);
  write_frames(frames, path);
  write_resolved(outs, ctx, "simulate");
  std::cout << "wrote " << count << " frames to " << path.string() << '\n';
}

void cmd_bounds(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const GridSpec grid = grid_of(c);
  const Truth truth = resolve_truth(c, grid);
  const std::vector<double> points = n_bar_points(c);
  make_dir(ctx.out);
  Outputs outs(ctx.force);
  std::vector<fs::path> dirs;
  for (double n_bar : points) {
    const fs::path dir = points.size() == 1 ? ctx.out : ctx.out / ("nbar_" + label(n_bar));
    for (const auto& f : bound_files(truth, c)) outs.claim(dir / f);
    dirs.push_back(dir);
  }
  outs.claim(ctx.out / "bounds.resolved.cfg");

  for (std::size_t k = 0; k < points.size(); ++k) {
    make_dir(dirs[k]);
    const ProbeConfig probe = probe_of(c, grid, points[k]);
    const BoundsResult r = compute_bounds(truth, probe, c, c.u64("seed"), ctx.threads);
    write_bounds(dirs[k], r, truth, probe);
    std::cout << "n_bar " << label(points[k]);
    for (const VarianceMap& m : r.maps) {
      std::cout << ", " << to_string(m.kind) << " " << format_number(m.total);
    }
    std::cout << '\n';
  }
  write_resolved(outs, ctx, "bounds");
}

void cmd_estimate(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const GridSpec grid = grid_of(c);
  fs::path frames_path = c.str("frames_file");
  if (frames_path.empty()) frames_path = ctx.out / "frames.imgx";
  if (!fs::exists(frames_path)) throw UsageError("frames file not found: " + frames_path.string());
  const FrameEnsemble frames = read_frames(frames_path);
  if (frames.side != grid.side) {
    throw UsageError("frames are " + std::to_string(frames.side) + " pixels wide, config side is " +
                     std::to_string(grid.side));
  }
  // The truth only selects the family for the likelihood fit; it is optional.
  Truth truth;
  if (!c.str("theta").empty() || !c.str("truth").empty()) truth = resolve_truth(c, grid);
  const ProbeConfig probe = probe_of(c, grid, c.number("n_bar"));
  const auto estimator = make_estimator(c, truth, probe, c.u64("seed"));

  make_dir(ctx.out);
  Outputs outs(ctx.force);
  const fs::path recon_path = outs.claim(ctx.out / "recon.imgx");
  const fs::path fits_path = outs.claim(ctx.out / "fits.json");
  outs.claim(ctx.out / "estimate.resolved.cfg");

  const ReconstructionEnsemble recons = run_ensemble(*estimator, frames, ctx.threads);
  if (recons.images.empty()) fail(ErrorCode::kNonConvergence, "no frame produced an estimate");
  write_ensemble(recons, recon_path);
  write_fits(fits_path, recons);
  write_resolved(outs, ctx, "estimate");
  std::cout << "estimated " << recons.images.size() << " frames (" << recons.failures.size()
            << " flagged) into " << recon_path.string() << '\n';
}

void cmd_evaluate(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const GridSpec grid = grid_of(c);
  const Truth truth = resolve_truth(c, grid);
  fs::path recon_path = c.str("reconstructions");
  if (recon_path.empty()) recon_path = ctx.out / "recon.imgx";
  if (!fs::exists(recon_path)) {
    throw UsageError("reconstructions file not found: " + recon_path.string());
  }
  ReconstructionEnsemble recons = load_external_reconstructions(recon_path);
  if (recons.side != grid.side) {
    throw UsageError("reconstructions are " + std::to_string(recons.side) +
                     " pixels wide, config side is " + std::to_string(grid.side));
  }
  const std::string kind = c.str("estimator");
  recons.provenance = parse_estimator_kind(kind) == EstimatorKind::kExternal
                          ? recons.provenance
                          : std::string(to_string(parse_estimator_kind(kind)));
  const ProbeConfig probe = probe_of(c, grid, c.number("n_bar"));

  make_dir(ctx.out);
  Outputs outs(ctx.force);
  for (const auto& f : kEvaluationFiles) outs.claim(ctx.out / f);
  outs.claim(ctx.out / "evaluate.resolved.cfg");

  const BoundsResult bounds = compute_bounds(truth, probe, c, c.u64("seed"), ctx.threads);
  const EvaluationReport report = evaluate_and_write(ctx.out, truth, recons, bounds, probe, c);
  write_resolved(outs, ctx, "evaluate");
  print_totals(report, probe.n_bar);
}

void cmd_reproduce(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const GridSpec grid = grid_of(c);
  const Truth truth = resolve_truth(c, grid);
  const std::vector<double> points = n_bar_points(c);
  const int count = c.integer("frames");
  if (count < 1) throw UsageError("frames must be at least 1");
  const std::uint64_t seed = c.u64("seed");

  make_dir(ctx.out);
  Outputs outs(ctx.force);
  outs.claim(ctx.out / "truth.imgx");
  if (truth.theta) outs.claim(ctx.out / "theta.json");
  outs.claim(ctx.out / "summary.csv");
  outs.claim(ctx.out / "reproduce.resolved.cfg");
  std::vector<fs::path> dirs;
  for (double n_bar : points) {
    const fs::path dir = ctx.out / ("nbar_" + label(n_bar));
    for (const auto& f : bound_files(truth, c)) outs.claim(dir / f);
    for (const auto& f : kEvaluationFiles) outs.claim(dir / f);
    for (const char* f : {"frames.imgx", "recon.imgx", "fits.json"}) outs.claim(dir / f);
    dirs.push_back(dir);
  }
  // Resolve the estimator before any work so a bad choice fails fast.
  make_estimator(c, truth, probe_of(c, grid, points.front()), seed);

  write_truth(outs, ctx.out, truth);
  std::vector<std::string> header = {"n_bar", "frames", "failures", "total_mse"};
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < points.size(); ++k) {
    make_dir(dirs[k]);
    const ProbeConfig probe = probe_of(c, grid, points[k]);
    const std::uint64_t point_seed = derive_seed(seed, Stream::kDataset, k);
    const FrameEnsemble frames =
        sample_ensemble(expected_counts(truth.image, probe), count, point_seed, ctx.threads);
    write_frames(frames, dirs[k] / "frames.imgx");

    const BoundsResult bounds = compute_bounds(truth, probe, c, point_seed, ctx.threads);
    write_bounds(dirs[k], bounds, truth, probe);

    const auto estimator = make_estimator(c, truth, probe, point_seed);
    const ReconstructionEnsemble recons = run_ensemble(*estimator, frames, ctx.threads);
    if (recons.images.empty()) fail(ErrorCode::kNonConvergence, "no frame produced an estimate");
    write_ensemble(recons, dirs[k] / "recon.imgx");
    write_fits(dirs[k] / "fits.json", recons);

    const EvaluationReport report =
        evaluate_and_write(dirs[k], truth, recons, bounds, probe, c);
    print_totals(report, points[k]);

    std::vector<std::string> row = {format_number(points[k]), std::to_string(recons.images.size()),
                                    std::to_string(recons.failures.size()),
                                    format_number(report.total_mse)};
    for (const BoundRatio& r : report.ratios) {
      if (k == 0) {
        header.push_back(std::string(to_string(r.bound)));
        header.push_back("mse_over_" + std::string(to_string(r.bound)));
      }
      row.push_back(format_number(r.bound_total));
      row.push_back(format_number(r.ratio));
    }
    rows.push_back(std::move(row));
  }
  write_table(ctx.out / "summary.csv", header, rows);
  write_resolved(outs, ctx, "reproduce");
}

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const UsageError*>(&e) != nullptr) return 2;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kDimensionMismatch:
      case ErrorCode::kFormatError:
      case ErrorCode::kBadMagic:
      case ErrorCode::kSizeMismatch:
      case ErrorCode::kUnsupportedDtype:
      case ErrorCode::kIoError: return 2;
      default: return 1;
    }
  }
  return 1;
}

}  // namespace qlimits::cli
