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

#ifndef STOCHEQ_GAME_HPP_
#define STOCHEQ_GAME_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stocheq {

using PlayerId = int;
using StateId = int;

// A mixed strategy is a probability vector over one player's actions at one
// state: nonnegative weights summing to 1 within kProbSumTol.
using MixedStrategy = std::vector<double>;
// One mixed strategy per player, all at the same state.
using StateStrategies = std::vector<MixedStrategy>;
// [state][player] -> mixed strategy. Entries at terminal states are empty.
using StrategyProfile = std::vector<StateStrategies>;

// Probability rows must sum to 1 within this tolerance to be valid.
inline constexpr double kProbSumTol = 1e-12;
// Rows off by more than kProbSumTol but within this are normalized on input;
// anything further off is rejected.
inline constexpr double kProbNormalizeTol = 1e-9;

struct OutcomeEntry {
  StateId successor = 0;
  double probability = 0.0;
};

// Finite n-player stochastic game over a finite state set. Nonterminal states
// carry per-player action sets, per-joint-profile transition rows and optional
// per-joint-profile rewards; terminal states carry only a per-player payoff.
//
// Joint action profiles at a state are indexed mixed-radix with player 0 as
// the most significant digit (the last player varies fastest).
//
// Instances are plain data and immutable by convention once built: concurrent
// readers are safe, mutation means constructing a replacement.
struct StochasticGame {
  std::vector<std::string> player_names;
  std::vector<std::string> state_names;
  std::vector<std::uint8_t> terminal;            // per state, 0/1
  StateId initial_state = 0;

  // [state][player] -> number of actions. Empty row for terminal states.
  std::vector<std::vector<int>> action_counts;

  // Per-profile sparse transition rows, CSR-style per state:
  // entries for profile p of state s are
  //   transition_entries[s][transition_offsets[s][p] .. transition_offsets[s][p+1])
  std::vector<std::vector<std::uint64_t>> transition_offsets;
  std::vector<std::vector<OutcomeEntry>> transition_entries;

  // [state] -> flat vector of size num_profiles(s) * num_players(), laid out
  // profile-major. An empty vector means all rewards at that state are zero.
  std::vector<std::vector<double>> rewards;

  // [state][player] -> payoff on reaching this terminal state. Empty for
  // nonterminal states.
  std::vector<std::vector<double>> terminal_payoffs;

  int num_players() const { return static_cast<int>(player_names.size()); }
  int num_states() const { return static_cast<int>(state_names.size()); }
  bool is_terminal(StateId s) const { return terminal[static_cast<size_t>(s)] != 0; }

  long num_profiles(StateId s) const;
  long profile_index(StateId s, std::span<const int> actions) const;
  double reward(StateId s, long profile, PlayerId p) const;
  std::span<const OutcomeEntry> outcomes(StateId s, long profile) const;
  std::vector<StateId> nonterminal_states() const;
};

// Real value per (state, player). Terminal entries always hold the terminal
// payoff and are never overwritten by value updates.
struct ValueTable {
  int players = 0;
  std::vector<double> values;  // [state * players + player]

  double at(StateId s, PlayerId p) const {
    return values[static_cast<size_t>(s) * players + p];
  }
  double& at(StateId s, PlayerId p) {
    return values[static_cast<size_t>(s) * players + p];
  }
  int num_states() const {
    return players == 0 ? 0 : static_cast<int>(values.size()) / players;
  }
};

// Value table with all nonterminal entries set to `nonterminal_init` and
// terminal entries set to the terminal payoffs.
ValueTable make_value_table(const StochasticGame& game, double nonterminal_init);

// Per-player expected payoff over joint action profiles at one state, with
// continuation values already folded in.
struct PayoffTensor {
  std::vector<int> action_counts;            // per player
  std::vector<std::vector<double>> values;   // [player][profile]

  int num_players() const { return static_cast<int>(action_counts.size()); }
  long num_profiles() const;
  long index(std::span<const int> actions) const;
};

struct Violation {
  StateId state = -1;   // -1 when not state-specific
  long profile = -1;    // -1 when not profile-specific
  std::string rule;
};

// Diagnoses every invariant breach in `game`. Empty result iff the game is
// well formed. Never throws; diagnostics are data.
std::vector<Violation> validate_game(const StochasticGame& game);

// Expected stage payoff tensor at a nonterminal state: entry for player i at
// profile a is reward(state, a, i) + sum over successors of P(state, a, q) *
// values(q, i). Throws std::invalid_argument on a terminal state.
PayoffTensor build_payoff_tensor(const StochasticGame& game, StateId state,
                                 const ValueTable& values);

// Expected payoff per player when all players independently mix according to
// `strategies`. Throws std::invalid_argument on dimension mismatch.
std::vector<double> expected_profile_payoff(const PayoffTensor& tensor,
                                            const StateStrategies& strategies);

// Mixed-radix odometer over joint profiles; `actions` must start zeroed.
// Returns false once all profiles have been visited.
bool next_profile(std::span<const int> counts, std::span<int> actions);

bool is_distribution(std::span<const double> weights, double sum_tol);

}  // namespace stocheq

#endif  // STOCHEQ_GAME_HPP_
