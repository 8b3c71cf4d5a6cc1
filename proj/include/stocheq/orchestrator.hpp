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

#ifndef STOCHEQ_ORCHESTRATOR_HPP_
#define STOCHEQ_ORCHESTRATOR_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "stocheq/game.hpp"
#include "stocheq/stage_solver.hpp"

namespace stocheq {

struct SolverConfig {
  enum class Algorithm { kViFp, kPiFp };
  enum class InitialValues { kZero, kPessimistic, kCustom };

  Algorithm algorithm = Algorithm::kPiFp;
  StoppingCondition stage_stop = StoppingCondition::fixed(10'000);
  // Outer loop halts when either the iteration cap is hit or the value
  // tables move by no more than value_delta.
  int max_outer_iterations = 25;
  double value_delta = 1e-4;
  int workers = 1;
  std::uint64_t seed = 0;  // reserved for randomized stage initialization

  InitialValues initial_values = InitialValues::kZero;
  // Constant for kPessimistic; when unset, the minimum terminal payoff.
  std::optional<double> pessimistic_constant;
  ValueTable custom_initial_values;  // used with kCustom

  // Computing epsilon costs one best-response MDP solve per player per outer
  // iteration; disabling the trace skips it everywhere except the final
  // iteration, whose epsilon is always reported.
  bool epsilon_trace = true;
};

struct IterationRecord {
  std::optional<double> epsilon;  // absent only when the trace is disabled
  double max_value_dev = 0.0;
  std::int64_t millis = 0;  // stage solving + value update, excluding epsilon
};

struct ConvergenceReport {
  std::vector<IterationRecord> iterations;
  StrategyProfile final_profile;
  ValueTable final_values;
  bool converged = false;  // true iff the value-delta criterion triggered
  double final_epsilon = 0.0;
  std::vector<double> final_gains;  // per player, for the final profile

  int iterations_run() const { return static_cast<int>(iterations.size()); }
};

struct StageSolveResult {
  StrategyProfile profile;
  std::vector<double> regrets;  // per state; zero at terminal states
};

// Deterministic contiguous split of `states` into exactly d chunks whose
// sizes differ by at most one.
std::vector<std::vector<StateId>> partition_states(const std::vector<StateId>& states,
                                                   int d);

// Solves every nonterminal stage game against the frozen `values` snapshot,
// d stage games at a time. The result is a pure function of
// (game, values, stop) - worker count only affects wall-clock time. A worker
// failure surfaces the underlying error prefixed with the state name.
StageSolveResult solve_all_stages(const StochasticGame& game, const ValueTable& values,
                                  const StoppingCondition& stop, int workers);

// Outer loop with local (value-iteration) updates. Non-convergence within
// the iteration cap is reported via converged=false, never an exception.
ConvergenceReport run_vi_fp(const StochasticGame& game, const SolverConfig& config);

// Outer loop with global policy-evaluation updates. A profile inducing a
// non-absorbing chain surfaces as an error naming the outer iteration.
ConvergenceReport run_pi_fp(const StochasticGame& game, const SolverConfig& config);

// Dispatches on config.algorithm.
ConvergenceReport run_solver(const StochasticGame& game, const SolverConfig& config);

}  // namespace stocheq

#endif  // STOCHEQ_ORCHESTRATOR_HPP_
