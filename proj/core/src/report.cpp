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

#include "qlimits/report.hpp"

#include <cmath>
#include <fstream>

#include "qlimits/error.hpp"

namespace qlimits {

namespace {

// JSON has no infinity; unbounded ratios are written as null.
nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string_view unit_of(MapKind kind) {
  switch (kind) {
    case MapKind::kSql:
    case MapKind::kHl: return "counts^2";
    default: return "transmittance^2";
  }
}

}  // namespace

nlohmann::ordered_json theta_to_json(const ParamVector& theta) {
  validate(theta);
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  const auto names = param_names(theta.family);
  for (std::size_t i = 0; i < names.size(); ++i) values[names[i]] = theta.values[i];
  return {{"family", to_string(theta.family)}, {"values", values}};
}

ParamVector theta_from_json(const nlohmann::json& j) {
  try {
    ParamVector theta{parse_family(j.at("family").get<std::string>()), {}};
    const auto names = param_names(theta.family);
    const auto& values = j.at("values");
    theta.values.resize(static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < names.size(); ++i) {
      theta.values[static_cast<Eigen::Index>(i)] = values.at(names[i]).get<double>();
    }
    require(values.size() == names.size(), ErrorCode::kFormatError,
            "theta has unexpected parameter names");
    return theta;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormatError, std::string("malformed theta: ") + e.what());
  }
}

nlohmann::ordered_json build_report(const ReportInputs& in) {
  require(in.evaluation != nullptr, ErrorCode::kInvalidArgument, "report needs an evaluation");
  const EvaluationReport& ev = *in.evaluation;
  nlohmann::ordered_json j;
  j["truth_family"] = in.truth_family;
  j["theta"] = in.theta ? theta_to_json(*in.theta)["values"] : nlohmann::ordered_json(nullptr);
  j["n_bar"] = in.n_bar;
  j["convention"] = to_string(in.convention);
  j["estimator"] = in.estimator;
  j["frames"] = ev.ensemble_size;

  nlohmann::ordered_json totals;
  nlohmann::ordered_json units;
  totals["mse"] = ev.total_mse;
  units["mse"] = "transmittance^2";
  if (ev.bias_sq_map.size() > 0) {
    totals["bias_sq"] = ev.total_bias_sq;
    totals["variance"] = ev.total_variance;
    units["bias_sq"] = "transmittance^2";
    units["variance"] = "transmittance^2";
  }
  for (const VarianceMap& b : in.bounds) {
    const std::string key(to_string(b.kind));
    totals[key] = number(b.total);
    units[key] = unit_of(b.kind);
    if (b.excluded_pixels > 0) j["excluded_pixels"][key] = b.excluded_pixels;
  }
  j["totals"] = totals;
  j["units"] = units;

  nlohmann::ordered_json ratios = nlohmann::ordered_json::object();
  for (const BoundRatio& r : ev.ratios) ratios[std::string(to_string(r.bound))] = number(r.ratio);
  j["ratios"] = ratios;
  j["failures"] = in.failures;
  j["clip_fraction"] = in.clip_fraction;
  if (!in.maps.empty()) j["maps"] = in.maps;
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorCode::kIoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  require(out.good(), ErrorCode::kIoError, "failed writing " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIoError, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormatError, path.string() + ": " + e.what());
  }
}

}  // namespace qlimits
