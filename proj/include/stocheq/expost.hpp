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

#ifndef STOCHEQ_EXPOST_HPP_
#define STOCHEQ_EXPOST_HPP_

#include <vector>

#include "stocheq/game.hpp"

namespace stocheq {

// The single-agent decision problem a player faces when everyone else is
// pinned to a strategy profile: opponent actions are marginalized out of the
// transitions and rewards, the player's own actions stay free.
struct BestResponseMdp {
  PlayerId player = 0;
  std::vector<StateId> states;       // nonterminal states, ascending id
  std::vector<int> row_of_state;     // state id -> row, or -1
  std::vector<int> action_counts;    // per row
  // transition[row]: action-major, size action_counts[row] * n(), columns
  // over nonterminal rows. Absorbing mass is the row deficit.
  std::vector<std::vector<double>> transition;
  // reward[row][action]: expected immediate reward plus probability-weighted
  // terminal payoff for `player`.
  std::vector<std::vector<double>> reward;

  int n() const { return static_cast<int>(states.size()); }
};

struct PolicyIterationResult {
  std::vector<int> policy;      // pure action per row
  std::vector<double> values;   // per row
  int iterations = 0;           // improvement rounds performed
};

struct ExPostResult {
  double epsilon = 0.0;
  std::vector<double> gains;  // per player, best-response gain at the initial state
};

BestResponseMdp build_best_response_mdp(const StochasticGame& game,
                                        const StrategyProfile& profile,
                                        PlayerId player);

// Total-reward policy iteration: evaluate the current policy by linear solve,
// then improve greedily, keeping the incumbent action on ties, until the
// policy repeats. The initial policy may be mixed; it is evaluated by
// expectation and the first improvement step lands on a pure policy.
// Throws NonAbsorbingChainError if some policy fails to reach absorption.
PolicyIterationResult policy_iteration(const BestResponseMdp& mdp,
                                       const std::vector<MixedStrategy>& initial_policy);

// The ex-post check: for every player, solve the best-response MDP induced by
// the others' strategies and report the gain over just playing the profile,
// measured at the initial state. epsilon is the largest gain; the profile is
// an epsilon-Nash equilibrium. Per-player solves run on up to `workers`
// threads (0 = one per player).
ExPostResult ex_post_epsilon(const StochasticGame& game, const StrategyProfile& profile,
                             int workers = 0);

// Independent ground truth for tiny games: enumerates every pure stationary
// deviation policy of every player and evaluates each by direct elimination,
// sharing no solver code with ex_post_epsilon. Refuses games with more than
// `kBruteForceLimit` policies for some player.
double brute_force_epsilon(const StochasticGame& game, const StrategyProfile& profile);

inline constexpr double kBruteForceLimit = 1e6;

}  // namespace stocheq

#endif  // STOCHEQ_EXPOST_HPP_
