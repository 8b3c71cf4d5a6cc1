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

#ifndef STOCHEQ_VALUE_UPDATE_HPP_
#define STOCHEQ_VALUE_UPDATE_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "stocheq/game.hpp"

namespace stocheq {

// Policy evaluation results must satisfy the Bellman equations to within
// this residual.
inline constexpr double kBellmanResidualTol = 1e-8;

// The Markov chain over nonterminal states induced by fixing a strategy
// profile. Row deficits (1 - row sum) are the per-step absorption
// probability; terminal payoffs and immediate rewards are folded into the
// per-player absorption reward vector.
struct InducedChain {
  std::vector<StateId> states;            // nonterminal states, ascending id
  std::vector<int> row_of_state;          // state id -> row index, or -1
  std::vector<double> p;                  // row-major n x n
  std::vector<std::vector<double>> absorb;  // [player][row]

  int n() const { return static_cast<int>(states.size()); }
};

// Raised when policy evaluation meets a chain that cannot reach absorption
// (or is numerically indistinguishable from one).
struct NonAbsorbingChainError : std::runtime_error {
  explicit NonAbsorbingChainError(std::string what, std::vector<StateId> states_)
      : std::runtime_error(std::move(what)), trapped_states(std::move(states_)) {}
  std::vector<StateId> trapped_states;
};

// One local (value-iteration style) update: each nonterminal value becomes
// the expected stage payoff under `profile` with continuation given by the
// current `values`. Terminal entries pass through unchanged.
ValueTable value_iteration_update(const StochasticGame& game,
                                  const StrategyProfile& profile,
                                  const ValueTable& values);

InducedChain create_transition_matrix(const StochasticGame& game,
                                      const StrategyProfile& profile);

// Global update: solves (I - P) v = r for every player with one shared LU
// factorization. Throws NonAbsorbingChainError, naming the trapped states,
// when some state cannot reach absorption under the profile; near-singular
// systems that pass the reachability check are reported the same way.
ValueTable evaluate_policy(const StochasticGame& game, const InducedChain& chain);

// max over (state, player) of |a - b|. Throws on shape mismatch.
double max_dev(const ValueTable& a, const ValueTable& b);

}  // namespace stocheq

#endif  // STOCHEQ_VALUE_UPDATE_HPP_
