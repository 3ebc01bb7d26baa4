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
#include <string>

#include "run_config.hpp"

namespace qlimits::cli {

struct Context {
  RunConfig config;
  std::filesystem::path out;
  bool force = false;
  int threads = 1;
};

void cmd_generate(const Context& ctx);
void cmd_simulate(const Context& ctx);
void cmd_bounds(const Context& ctx);
void cmd_estimate(const Context& ctx);
void cmd_evaluate(const Context& ctx);
void cmd_reproduce(const Context& ctx);

/// 0 success, 1 numerical failure, 2 usage or configuration error.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace qlimits::cli
