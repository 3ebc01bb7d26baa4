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

#include <cstdint>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "run_config.hpp"

namespace {

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qlimits::cli;

  CLI::App app{"Quantum-limited imaging: bounds, simulation and estimation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string seed;
  std::string out;
  bool force = false;
  int threads = 0;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "master seed (unsigned 64-bit); overrides the config");
  app.add_option("--out", out, "output directory; overrides the config");
  app.add_flag("--force", force, "overwrite existing outputs");
  app.add_option("--threads", threads, "worker threads (0 = config value)")->check(CLI::NonNegativeNumber);

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const Context&);
  };
  const Command commands[] = {
      {"generate", "write a truth image and its parameters, or a dataset", cmd_generate},
      {"simulate", "draw Poisson frames of the truth", cmd_simulate},
      {"bounds", "Fisher matrix, covariance bound and variance maps", cmd_bounds},
      {"estimate", "reconstruct frames with the plug-in or likelihood estimator", cmd_estimate},
      {"evaluate", "score reconstructions against the truth and the bounds", cmd_evaluate},
      {"reproduce", "simulate, bound, estimate and evaluate over an n_bar sweep", cmd_reproduce},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Context ctx;
    if (!config_path.empty()) ctx.config = RunConfig::load(config_path);
    if (!seed.empty()) ctx.config.set("seed", seed);
    if (!out.empty()) ctx.config.set("out", out);
    if (threads > 0) ctx.config.set("threads", std::to_string(threads));
    if (ctx.config.str("seed").empty()) {
      ctx.config.set("seed", std::to_string(fresh_seed()));
      std::cerr << "no seed given; using " << ctx.config.str("seed") << '\n';
    }
    ctx.config.u64("seed");  // validate early
    ctx.out = ctx.config.str("out");
    ctx.force = force;
    ctx.threads = ctx.config.integer("threads");
    if (ctx.threads < 1) throw UsageError("threads must be at least 1");

    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) c.run(ctx);
    }
    return 0;
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    std::cerr << "qlimits: " << (code == 2 ? "usage error: " : "error: ") << e.what() << '\n';
    return code;
  }
}
