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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qlimits/bounds.hpp"
#include "qlimits/evaluation.hpp"
#include "qlimits/image_models.hpp"
#include "qlimits/probe.hpp"

namespace qlimits {

struct ReportInputs {
  std::string truth_family;           // family name, or "raster"
  std::optional<ParamVector> theta;   // absent for raster truth
  double n_bar = 0.0;
  Convention convention = Convention::kAmplitudeSquared;
  std::string estimator;
  const EvaluationReport* evaluation = nullptr;
  std::vector<VarianceMap> bounds;
  std::size_t failures = 0;
  double clip_fraction = 0.0;
  std::map<std::string, std::string> maps;  // map name -> CSV file name
};

/// Evaluation report:
///
///   {"truth_family", "theta", "n_bar", "convention", "estimator", "frames",
///    "totals": {"mse", "bias_sq", "variance", "qcrb_j", "qcrb_mc", "sql",
///               "hl", "sql_t", "hl_t"},
///    "units": {...}, "ratios": {"qcrb_j": mse / qcrb_j, ...},
///    "failures", "clip_fraction", "maps": {...}}
///
/// Totals for bounds that were not computed are omitted; sql/hl are in
/// detected-count units and sql_t/hl_t in transmittance units, as labelled
/// under "units".
nlohmann::ordered_json build_report(const ReportInputs& inputs);

/// theta as {"family": ..., "values": {"name": value, ...}}.
nlohmann::ordered_json theta_to_json(const ParamVector& theta);
ParamVector theta_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace qlimits
