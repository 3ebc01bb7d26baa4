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

#include "run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

namespace qlimits::cli {

namespace {

// Key, default value. The order here is the order of the resolved file.
const std::vector<std::pair<std::string, std::string>>& defaults() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"family", "single_linear"},
      {"side", "64"},
      {"scale", "1"},
      {"seed", ""},
      {"theta", ""},
      {"truth", ""},
      {"n_bar", "1000"},
      {"n_bar_list", ""},
      {"n_bar_range", "40.96,4096"},
      {"convention", "amplitude_squared"},
      {"count", "1"},
      {"frames", "1000"},
      {"frames_file", ""},
      {"reconstructions", ""},
      {"estimator", "ml"},
      {"multistart", "8"},
      {"max_iterations", "200"},
      {"mc_samples", "100000"},
      {"histogram_pixel", ""},
      {"histogram_bins", "30"},
      {"threads", "1"},
      {"out", "."},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& [k, v] : defaults()) values_[k] = v;
}

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& kv : defaults()) out.push_back(kv.first);
    return out;
  }();
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (values_.count(key) == 0) throw UsageError("unknown config key '" + key + "'");
  values_[key] = value;
  explicit_[key] = true;
}

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    const std::string where = origin + ":" + std::to_string(number);
    if (eq == std::string::npos) throw UsageError(where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (cfg.explicitly_set(key)) throw UsageError(where + ": repeated key '" + key + "'");
    if (cfg.values_.count(key) == 0) throw UsageError(where + ": unknown config key '" + key + "'");
    cfg.set(key, trim(t.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

const std::string& RunConfig::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
  return it->second;
}

int RunConfig::integer(const std::string& key) const {
  const std::string& v = str(key);
  errno = 0;
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno != 0 || x < -2147483647L || x > 2147483647L) {
    throw UsageError("config key '" + key + "' must be an integer, got '" + v + "'");
  }
  return static_cast<int>(x);
}

std::uint64_t RunConfig::u64(const std::string& key) const {
  const std::string& v = str(key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 0);
  if (v.empty() || v.front() == '-' || *end != '\0' || errno != 0) {
    throw UsageError("config key '" + key + "' must be an unsigned 64-bit integer, got '" + v + "'");
  }
  return static_cast<std::uint64_t>(x);
}

double RunConfig::number(const std::string& key) const {
  const std::string& v = str(key);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') {
    throw UsageError("config key '" + key + "' must be a number, got '" + v + "'");
  }
  return x;
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(str(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') {
      throw UsageError("config key '" + key + "' must be a comma-separated list of numbers");
    }
    out.push_back(x);
  }
  return out;
}

std::string RunConfig::resolved() const {
  std::ostringstream out;
  for (const auto& key : known_keys()) out << key << " = " << values_.at(key) << '\n';
  return out.str();
}

}  // namespace qlimits::cli
