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

#ifndef STOCHEQ_HOSTILITY_HPP_
#define STOCHEQ_HOSTILITY_HPP_

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stocheq/game.hpp"

namespace stocheq {

// Parameters of a hostility game: one blue player facing m independent red
// players. Each stage, everyone picks a move; depending on whether the blue
// move counters each red move, blue or red may win outright, otherwise the
// confrontation repeats with the cumulative hostility raised by the sum of
// the chosen moves' hostility levels. Hitting the kinetic threshold K ends
// the game with the kinetic payoff for everyone.
//
// Red-indexed tables (counters, b_*, r_*) are indexed by player id with the
// blue slot (player 0) left empty.
struct HostilityGameSpec {
  struct Player {
    std::string name;
    bool blue = false;
    bool operator==(const Player&) const = default;
  };

  std::vector<Player> players;                    // players[0] is the blue player
  std::vector<std::vector<std::string>> moves;    // [player][move]

  // counters[red][red_move] -> ascending list of blue move indices that
  // counter that move.
  std::vector<std::vector<std::vector<int>>> counters;

  // Blue success probability against red player j when blue's move is
  // countered (b_def) / uncountered (b_undef), indexed [red][blue_move].
  std::vector<std::vector<double>> b_def;
  std::vector<std::vector<double>> b_undef;
  // Red player j's success probability when its move is countered (r_def) /
  // uncountered (r_undef), indexed [red][red_move].
  std::vector<std::vector<double>> r_def;
  std::vector<std::vector<double>> r_undef;

  std::vector<double> blue_win_payoff;   // per player
  std::vector<double> red_win_payoff;    // per player
  std::vector<double> kinetic_payoff;    // per player

  std::vector<std::vector<double>> hostility;  // [player][move]
  double kinetic_threshold = 0.0;              // K

  int num_players() const { return static_cast<int>(players.size()); }
  int move_index(PlayerId p, const std::string& move) const;  // -1 if unknown

  bool operator==(const HostilityGameSpec&) const = default;
};

struct OutcomeTriple {
  double blue_win = 0.0;
  double red_win = 0.0;
  double repeat = 0.0;
};

struct SpecParseError : std::runtime_error {
  explicit SpecParseError(const std::string& what) : std::runtime_error(what) {}
};

// Resolves one joint move to its outcome distribution. Each red move is
// countered iff blue's move is in its counter set; that same condition picks
// the defended/undefended success probabilities on both sides. Per-red
// successes aggregate as: blue's overall chance q_B is the mean of its
// per-red success probabilities, red's overall chance q_R is the chance that
// at least one red succeeds, and
//   blue_win = q_B * (1 - q_R),  red_win = q_R * (1 - q_B),
// with the remainder repeating (both-succeed and both-fail repeat).
OutcomeTriple resolve_outcome(const HostilityGameSpec& spec,
                              std::span<const int> joint_move);

// Materializes the stochastic game: hostility-sum states G_0, G_1, ... below
// K, plus terminal states G_K (kinetic), B and R, ordered by ascending sum
// with the terminals last. When every hostility level is an integer the full
// integer lattice 0..ceil(K)-1 is materialized (so an integer threshold K
// yields K+3 states); otherwise only hostility sums reachable from G_0
// become states. Sums at or above K clamp to the kinetic state.
//
// Throws std::invalid_argument on any nonpositive hostility level (finite
// play is only guaranteed for strictly positive levels) or other invalid
// spec fields.
StochasticGame build_hostility_game(const HostilityGameSpec& spec);

enum class SizeProfile { kSmall, kPaperScale };

// Deterministic synthetic spec: 1 blue + 3 red players. kPaperScale draws
// 7-10 moves per player, integer hostilities in [1,40], K = 300 and payoffs
// +100/-100 with kinetic -200; kSmall keeps 2-4 moves and K <= 30.
HostilityGameSpec generate_default_spec(std::uint64_t seed, SizeProfile profile);

// JSON round trip; parse_spec(serialize_spec(s)) == s. Parse failures throw
// SpecParseError naming the offending field path.
HostilityGameSpec parse_spec(const std::string& text);
std::string serialize_spec(const HostilityGameSpec& spec);

// FNV-1a over the canonical serialization, as a hex string. Stable across
// parse/serialize round trips.
std::string spec_hash(const HostilityGameSpec& spec);

}  // namespace stocheq

#endif  // STOCHEQ_HOSTILITY_HPP_
