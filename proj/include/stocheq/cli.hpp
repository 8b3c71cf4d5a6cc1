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

#ifndef STOCHEQ_CLI_HPP_
#define STOCHEQ_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "stocheq/expost.hpp"
#include "stocheq/hostility.hpp"
#include "stocheq/orchestrator.hpp"

namespace stocheq {

inline constexpr const char* kToolVersion = "stocheq 0.1.0";

struct GenerateOptions {
  std::uint64_t seed = 0;
  std::string profile = "small";  // "small" | "paper_scale"
  std::string out_path;
};

struct SolveOptions {
  std::string spec_path;
  std::string algorithm = "pi-fp";  // "vi-fp" | "pi-fp"
  long fp_iters = 10'000;
  bool fp_min_regret = false;
  int outer_iters = 25;
  double delta = 1e-4;
  int workers = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool no_epsilon_trace = false;
};

struct CheckOptions {
  std::string spec_path;
  std::string strategies_path;
};

// Writes a deterministic spec file for the given seed/profile.
void cmd_generate(const GenerateOptions& options);

// Runs the solver and writes trace.csv, strategies.json, values.json and
// manifest.json into out_dir. Algorithmic non-convergence is data
// (converged=false in the manifest), not a failure.
ConvergenceReport cmd_solve(const SolveOptions& options, std::ostream& log);

// Recomputes the ex-post check for a dumped strategy file; prints per-player
// gains and the overall epsilon.
ExPostResult cmd_check(const CheckOptions& options, std::ostream& log);

// Serialization of strategy profiles and value tables used by the artifact
// files; exposed so checks and tests can round-trip them.
std::string strategies_to_json(const StochasticGame& game, const HostilityGameSpec& spec,
                               const StrategyProfile& profile);
StrategyProfile strategies_from_json(const StochasticGame& game,
                                     const HostilityGameSpec& spec,
                                     const std::string& text);
std::string values_to_json(const StochasticGame& game, const ValueTable& values);
std::string trace_to_csv(const ConvergenceReport& report);

}  // namespace stocheq

#endif  // STOCHEQ_CLI_HPP_
