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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlimits::cli {

/// Configuration or command-line problem; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain-text `key = value` configuration. Blank lines and lines starting
/// with '#' are ignored. Unknown or repeated keys are rejected. Every key
/// has a default, so the resolved configuration is always complete.
class RunConfig {
 public:
  RunConfig();

  static RunConfig parse(const std::string& text, const std::string& origin = "<config>");
  static RunConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool explicitly_set(const std::string& key) const { return explicit_.count(key) > 0; }

  const std::string& str(const std::string& key) const;
  int integer(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  double number(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;  // comma separated, may be empty

  /// Every key in a stable order, one `key = value` per line.
  std::string resolved() const;

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> explicit_;
};

}  // namespace qlimits::cli
