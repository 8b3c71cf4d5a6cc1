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

#ifndef STOCHEQ_STAGE_SOLVER_HPP_
#define STOCHEQ_STAGE_SOLVER_HPP_

#include <cstdint>
#include <vector>

#include "stocheq/game.hpp"

namespace stocheq {

// Regret-threshold stopping is not guaranteed to ever trigger for >2 players,
// so it is always capped by this many fictitious-play rounds.
inline constexpr long kMaxFpIterations = 1'000'000;

struct StoppingCondition {
  enum class Kind {
    kFixedIterations,          // run exactly `iterations` rounds
    kRegretThreshold,          // stop once max regret <= gamma (capped)
    kFixedIterationsMinRegret  // run `iterations` rounds, return the
                               // lowest-regret averages seen
  };

  Kind kind = Kind::kFixedIterations;
  long iterations = 10'000;
  double gamma = 0.0;

  static StoppingCondition fixed(long t) {
    return {Kind::kFixedIterations, t, 0.0};
  }
  static StoppingCondition regret_below(double gamma) {
    return {Kind::kRegretThreshold, kMaxFpIterations, gamma};
  }
  static StoppingCondition fixed_min_regret(long t) {
    return {Kind::kFixedIterationsMinRegret, t, 0.0};
  }
};

struct StageSolution {
  StateStrategies profile;  // one mixed strategy per player
  double regret = 0.0;      // max regret of the returned profile
  long iterations_run = 0;
};

// Best response of `player` against the other players' mixed strategies.
// `strategies` holds one entry per player; the entry at `player` is ignored.
// Ties break toward the lowest action index. Returns (action, value).
std::pair<int, double> best_response(const PayoffTensor& tensor,
                                     const StateStrategies& strategies,
                                     PlayerId player);

// One fictitious-play averaging step:
//   (1 - 1/t) * average + (1/t) * pure(br_action),  t >= 1.
MixedStrategy fp_update(const MixedStrategy& average, int br_action, long t);

// Largest gain any single player can get by deviating from `strategies` to a
// pure action. Zero (within floating-point noise) iff the profile is a Nash
// equilibrium of the stage game.
double max_regret(const PayoffTensor& tensor, const StateStrategies& strategies);

// Simultaneous smoothed fictitious play: every round all players best-respond
// to the opponents' averages from the previous round, then all averages are
// updated together. Starts from `init` when given, else from the uniform
// mixed profile. Deterministic; non-convergence shows up as a large returned
// regret, never as a failure.
StageSolution solve_stage_game(const PayoffTensor& tensor,
                               const StoppingCondition& stop,
                               const StateStrategies* init = nullptr);

StateStrategies uniform_strategies(const PayoffTensor& tensor);
// Seeded random interior point of each player's simplex, for experiments
// that want non-uniform starts while staying reproducible.
StateStrategies random_strategies(const PayoffTensor& tensor, std::uint64_t seed);

}  // namespace stocheq

#endif  // STOCHEQ_STAGE_SOLVER_HPP_
