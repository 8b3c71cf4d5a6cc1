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

#include "stocheq/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "stocheq/expost.hpp"
#include "stocheq/parallel.hpp"
#include "stocheq/value_update.hpp"

namespace stocheq {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_millis(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since)
      .count();
}

void check_config(const StochasticGame& game, const SolverConfig& config) {
  if (config.max_outer_iterations < 1) {
    throw std::invalid_argument("solver config: max_outer_iterations must be >= 1");
  }
  if (config.value_delta < 0.0) {
    throw std::invalid_argument("solver config: value_delta must be >= 0");
  }
  if (config.workers < 1) {
    throw std::invalid_argument("solver config: workers must be >= 1");
  }
  if (config.initial_values == SolverConfig::InitialValues::kCustom) {
    const auto& custom = config.custom_initial_values;
    if (custom.players != game.num_players() ||
        custom.num_states() != game.num_states()) {
      throw std::invalid_argument("solver config: custom initial values shape mismatch");
    }
  }
}

ValueTable initial_values(const StochasticGame& game, const SolverConfig& config) {
  switch (config.initial_values) {
    case SolverConfig::InitialValues::kZero:
      return make_value_table(game, 0.0);
    case SolverConfig::InitialValues::kPessimistic: {
      if (config.pessimistic_constant) {
        return make_value_table(game, *config.pessimistic_constant);
      }
      double lowest = 0.0;
      bool seen = false;
      for (StateId s = 0; s < game.num_states(); ++s) {
        if (!game.is_terminal(s)) continue;
        for (double payoff : game.terminal_payoffs[static_cast<size_t>(s)]) {
          lowest = seen ? std::min(lowest, payoff) : payoff;
          seen = true;
        }
      }
      return make_value_table(game, lowest);
    }
    case SolverConfig::InitialValues::kCustom: {
      // Re-pin terminal entries so they can never be overridden from outside.
      ValueTable values = config.custom_initial_values;
      const ValueTable pinned = make_value_table(game, 0.0);
      for (StateId s = 0; s < game.num_states(); ++s) {
        if (!game.is_terminal(s)) continue;
        for (PlayerId p = 0; p < game.num_players(); ++p) {
          values.at(s, p) = pinned.at(s, p);
        }
      }
      return values;
    }
  }
  throw std::logic_error("unreachable");
}

ConvergenceReport run_outer(const StochasticGame& game, const SolverConfig& config,
                            bool global_update) {
  check_config(game, config);

  ConvergenceReport report;
  ValueTable values = initial_values(game, config);

  for (int iter = 1; iter <= config.max_outer_iterations; ++iter) {
    const auto started = Clock::now();
    StageSolveResult stage =
        solve_all_stages(game, values, config.stage_stop, config.workers);

    ValueTable next;
    if (global_update) {
      try {
        next = evaluate_policy(game, create_transition_matrix(game, stage.profile));
      } catch (const NonAbsorbingChainError& e) {
        throw NonAbsorbingChainError(
            "outer iteration " + std::to_string(iter) + ": " + e.what(),
            e.trapped_states);
      }
    } else {
      next = value_iteration_update(game, stage.profile, values);
    }
    const double dev = max_dev(next, values);
    const std::int64_t millis = elapsed_millis(started);

    const bool halting = dev <= config.value_delta || iter == config.max_outer_iterations;
    IterationRecord record;
    record.max_value_dev = dev;
    record.millis = millis;
    if (config.epsilon_trace || halting) {
      const ExPostResult check = ex_post_epsilon(game, stage.profile, config.workers);
      record.epsilon = check.epsilon;
      if (halting) {
        report.final_epsilon = check.epsilon;
        report.final_gains = check.gains;
      }
    }
    report.iterations.push_back(std::move(record));

    values = std::move(next);
    report.final_profile = std::move(stage.profile);
    if (dev <= config.value_delta) {
      report.converged = true;
      break;
    }
  }
  report.final_values = std::move(values);
  return report;
}

}  // namespace

std::vector<std::vector<StateId>> partition_states(const std::vector<StateId>& states,
                                                   int d) {
  if (d < 1) throw std::invalid_argument("partition_states: d must be >= 1");
  const auto ranges = partition_ranges(static_cast<int>(states.size()), d);
  std::vector<std::vector<StateId>> chunks;
  chunks.reserve(static_cast<size_t>(d));
  for (const auto& [begin, end] : ranges) {
    chunks.emplace_back(states.begin() + begin, states.begin() + end);
  }
  return chunks;
}

StageSolveResult solve_all_stages(const StochasticGame& game, const ValueTable& values,
                                  const StoppingCondition& stop, int workers) {
  const std::vector<StateId> states = game.nonterminal_states();

  StageSolveResult result;
  result.profile.resize(static_cast<size_t>(game.num_states()));
  result.regrets.assign(static_cast<size_t>(game.num_states()), 0.0);

  run_partitioned(static_cast<int>(states.size()), workers, [&](int i) {
    const StateId s = states[static_cast<size_t>(i)];
    try {
      const PayoffTensor tensor = build_payoff_tensor(game, s, values);
      StageSolution solution = solve_stage_game(tensor, stop);
      result.profile[static_cast<size_t>(s)] = std::move(solution.profile);
      result.regrets[static_cast<size_t>(s)] = solution.regret;
    } catch (const std::exception& e) {
      throw std::runtime_error("stage game at " +
                               game.state_names[static_cast<size_t>(s)] + ": " + e.what());
    }
  });
  return result;
}

ConvergenceReport run_vi_fp(const StochasticGame& game, const SolverConfig& config) {
  if (config.algorithm != SolverConfig::Algorithm::kViFp) {
    throw std::invalid_argument("run_vi_fp: config.algorithm mismatch");
  }
  return run_outer(game, config, /*global_update=*/false);
}

ConvergenceReport run_pi_fp(const StochasticGame& game, const SolverConfig& config) {
  if (config.algorithm != SolverConfig::Algorithm::kPiFp) {
    throw std::invalid_argument("run_pi_fp: config.algorithm mismatch");
  }
  return run_outer(game, config, /*global_update=*/true);
}

ConvergenceReport run_solver(const StochasticGame& game, const SolverConfig& config) {
  return config.algorithm == SolverConfig::Algorithm::kViFp ? run_vi_fp(game, config)
                                                            : run_pi_fp(game, config);
}

}  // namespace stocheq
