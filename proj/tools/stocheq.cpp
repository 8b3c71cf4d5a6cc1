// Copyright 2026 The Stocheq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>

#include <CLI11.hpp>

#include "stocheq/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Approximate Nash equilibrium solver for multiplayer stochastic games"};
  app.set_version_flag("--version", stocheq::kToolVersion);
  app.require_subcommand(1);

  stocheq::GenerateOptions generate;
  CLI::App* cmd_generate = app.add_subcommand("generate", "Write a synthetic hostility game spec");
  cmd_generate->add_option("--seed", generate.seed, "Generator seed")->required();
  cmd_generate->add_option("--profile", generate.profile, "small or paper_scale")
      ->check(CLI::IsMember({"small", "paper_scale"}))
      ->capture_default_str();
  cmd_generate->add_option("--out", generate.out_path, "Output spec path")->required();

  stocheq::SolveOptions solve;
  CLI::App* cmd_solve = app.add_subcommand("solve", "Solve a spec and dump artifacts");
  cmd_solve->add_option("--spec", solve.spec_path, "Spec file to solve")->required();
  cmd_solve->add_option("--algorithm", solve.algorithm, "vi-fp or pi-fp")
      ->check(CLI::IsMember({"vi-fp", "pi-fp"}))
      ->capture_default_str();
  cmd_solve->add_option("--fp-iters", solve.fp_iters, "Fictitious play rounds per stage game")
      ->capture_default_str();
  cmd_solve->add_flag("--fp-min-regret", solve.fp_min_regret,
                      "Return the lowest-regret averages seen instead of the final ones");
  cmd_solve->add_option("--outer-iters", solve.outer_iters, "Outer iteration cap")
      ->capture_default_str();
  cmd_solve->add_option("--delta", solve.delta, "Value-table convergence threshold")
      ->capture_default_str();
  cmd_solve->add_option("--workers", solve.workers, "Stage games solved in parallel")
      ->envname("STOCHEQ_WORKERS")
      ->capture_default_str();
  cmd_solve->add_option("--seed", solve.seed, "Run seed recorded in the manifest")
      ->capture_default_str();
  cmd_solve->add_option("--out", solve.out_dir, "Output directory")->required();
  cmd_solve->add_flag("--no-epsilon-trace", solve.no_epsilon_trace,
                      "Skip the per-iteration ex-post check (final iteration still checked)");

  stocheq::CheckOptions check;
  CLI::App* cmd_check = app.add_subcommand("check", "Ex-post check of a dumped strategy file");
  cmd_check->add_option("--spec", check.spec_path, "Spec file")->required();
  cmd_check->add_option("--strategies", check.strategies_path, "strategies.json to check")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_generate->parsed()) {
      stocheq::cmd_generate(generate);
    } else if (cmd_solve->parsed()) {
      stocheq::cmd_solve(solve, std::cout);
    } else if (cmd_check->parsed()) {
      stocheq::cmd_check(check, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
