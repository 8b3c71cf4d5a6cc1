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

#include "stocheq/game.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace stocheq {

namespace {

long count_profiles(const std::vector<int>& action_counts) {
  long prod = 1;
  for (int m : action_counts) prod *= m;
  return prod;
}

long mixed_radix_index(std::span<const int> counts, std::span<const int> digits) {
  if (digits.size() != counts.size()) {
    throw std::invalid_argument("profile_index: wrong number of actions");
  }
  long idx = 0;
  for (size_t p = 0; p < counts.size(); ++p) {
    if (digits[p] < 0 || digits[p] >= counts[p]) {
      throw std::invalid_argument("profile_index: action out of range");
    }
    idx = idx * counts[p] + digits[p];
  }
  return idx;
}

std::string format_prob(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

long StochasticGame::num_profiles(StateId s) const {
  return count_profiles(action_counts[static_cast<size_t>(s)]);
}

long StochasticGame::profile_index(StateId s, std::span<const int> actions) const {
  return mixed_radix_index(action_counts[static_cast<size_t>(s)], actions);
}

double StochasticGame::reward(StateId s, long profile, PlayerId p) const {
  const auto& r = rewards[static_cast<size_t>(s)];
  if (r.empty()) return 0.0;
  return r[static_cast<size_t>(profile) * num_players() + p];
}

std::span<const OutcomeEntry> StochasticGame::outcomes(StateId s, long profile) const {
  const auto& offs = transition_offsets[static_cast<size_t>(s)];
  const auto& ents = transition_entries[static_cast<size_t>(s)];
  const auto begin = offs[static_cast<size_t>(profile)];
  const auto end = offs[static_cast<size_t>(profile) + 1];
  return {ents.data() + begin, ents.data() + end};
}

std::vector<StateId> StochasticGame::nonterminal_states() const {
  std::vector<StateId> out;
  for (StateId s = 0; s < num_states(); ++s) {
    if (!is_terminal(s)) out.push_back(s);
  }
  return out;
}

ValueTable make_value_table(const StochasticGame& game, double nonterminal_init) {
  ValueTable table;
  table.players = game.num_players();
  table.values.assign(static_cast<size_t>(game.num_states()) * table.players,
                      nonterminal_init);
  for (StateId s = 0; s < game.num_states(); ++s) {
    if (!game.is_terminal(s)) continue;
    for (PlayerId p = 0; p < table.players; ++p) {
      table.at(s, p) = game.terminal_payoffs[static_cast<size_t>(s)][static_cast<size_t>(p)];
    }
  }
  return table;
}

long PayoffTensor::num_profiles() const { return count_profiles(action_counts); }

long PayoffTensor::index(std::span<const int> actions) const {
  return mixed_radix_index(action_counts, actions);
}

bool next_profile(std::span<const int> counts, std::span<int> actions) {
  for (size_t p = counts.size(); p-- > 0;) {
    if (++actions[p] < counts[p]) return true;
    actions[p] = 0;
  }
  return false;
}

bool is_distribution(std::span<const double> weights, double sum_tol) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) return false;  // also rejects NaN
    sum += w;
  }
  return std::fabs(sum - 1.0) <= sum_tol;
}

std::vector<Violation> validate_game(const StochasticGame& game) {
  std::vector<Violation> out;
  const int n = game.num_players();
  const int num_states = game.num_states();

  if (n < 1) out.push_back({-1, -1, "game must have at least one player"});

  const size_t ns = static_cast<size_t>(num_states);
  if (game.terminal.size() != ns || game.action_counts.size() != ns ||
      game.transition_offsets.size() != ns || game.transition_entries.size() != ns ||
      game.rewards.size() != ns || game.terminal_payoffs.size() != ns) {
    out.push_back({-1, -1, "per-state containers disagree on the number of states"});
    return out;  // indexing below would be unsafe
  }

  int num_nonterminal = 0;
  for (StateId s = 0; s < num_states; ++s) {
    if (!game.is_terminal(s)) ++num_nonterminal;
  }
  if (num_nonterminal == 0) {
    out.push_back({-1, -1, "game must have at least one nonterminal state"});
  }
  if (game.initial_state < 0 || game.initial_state >= num_states) {
    out.push_back({-1, -1, "initial state index out of range"});
  } else if (game.is_terminal(game.initial_state)) {
    out.push_back({game.initial_state, -1, "initial state must be nonterminal"});
  }

  for (StateId s = 0; s < num_states; ++s) {
    const size_t si = static_cast<size_t>(s);
    if (game.is_terminal(s)) {
      if (!game.action_counts[si].empty()) {
        out.push_back({s, -1, "terminal state has actions"});
      }
      if (!game.transition_entries[si].empty() ||
          (!game.transition_offsets[si].empty() && game.transition_offsets[si].back() != 0)) {
        out.push_back({s, -1, "terminal state has outgoing transitions"});
      }
      if (static_cast<int>(game.terminal_payoffs[si].size()) != n) {
        out.push_back({s, -1, "terminal state payoff vector has wrong size"});
      }
      continue;
    }

    if (static_cast<int>(game.action_counts[si].size()) != n) {
      out.push_back({s, -1, "action counts missing for some player"});
      continue;
    }
    bool counts_ok = true;
    for (PlayerId p = 0; p < n; ++p) {
      if (game.action_counts[si][static_cast<size_t>(p)] < 1) {
        out.push_back({s, -1, "player " + game.player_names[static_cast<size_t>(p)] +
                                  " has no actions"});
        counts_ok = false;
      }
    }
    if (!counts_ok) continue;

    const long profiles = game.num_profiles(s);
    if (game.transition_offsets[si].size() != static_cast<size_t>(profiles) + 1) {
      out.push_back({s, -1, "transition table does not cover all joint profiles"});
      continue;
    }
    if (!game.rewards[si].empty() &&
        game.rewards[si].size() != static_cast<size_t>(profiles) * n) {
      out.push_back({s, -1, "reward table has wrong size"});
    }

    for (long prof = 0; prof < profiles; ++prof) {
      double sum = 0.0;
      for (const OutcomeEntry& e : game.outcomes(s, prof)) {
        if (e.successor < 0 || e.successor >= num_states) {
          out.push_back({s, prof, "transition to nonexistent state"});
          continue;
        }
        if (e.probability < 0.0 || e.probability > 1.0) {
          out.push_back({s, prof,
                         "transition probability " + format_prob(e.probability) +
                             " outside [0,1]"});
        }
        sum += e.probability;
      }
      if (std::fabs(sum - 1.0) > kProbSumTol) {
        out.push_back({s, prof,
                       "transition probabilities sum to " + format_prob(sum) +
                           ", expected 1"});
      }
    }
  }
  return out;
}

PayoffTensor build_payoff_tensor(const StochasticGame& game, StateId state,
                                 const ValueTable& values) {
  if (state < 0 || state >= game.num_states() || game.is_terminal(state)) {
    throw std::invalid_argument("build_payoff_tensor: state " +
                                std::to_string(state) + " is not nonterminal");
  }
  if (values.players != game.num_players() ||
      values.num_states() != game.num_states()) {
    throw std::invalid_argument("build_payoff_tensor: value table shape mismatch");
  }
  const int n = game.num_players();
  const long profiles = game.num_profiles(state);

  PayoffTensor tensor;
  tensor.action_counts = game.action_counts[static_cast<size_t>(state)];
  tensor.values.assign(static_cast<size_t>(n),
                       std::vector<double>(static_cast<size_t>(profiles), 0.0));
  for (long prof = 0; prof < profiles; ++prof) {
    for (PlayerId p = 0; p < n; ++p) {
      double v = game.reward(state, prof, p);
      for (const OutcomeEntry& e : game.outcomes(state, prof)) {
        v += e.probability * values.at(e.successor, p);
      }
      tensor.values[static_cast<size_t>(p)][static_cast<size_t>(prof)] = v;
    }
  }
  return tensor;
}

std::vector<double> expected_profile_payoff(const PayoffTensor& tensor,
                                            const StateStrategies& strategies) {
  const int n = tensor.num_players();
  if (static_cast<int>(strategies.size()) != n) {
    throw std::invalid_argument("expected_profile_payoff: wrong number of strategies");
  }
  for (PlayerId p = 0; p < n; ++p) {
    if (static_cast<int>(strategies[static_cast<size_t>(p)].size()) !=
        tensor.action_counts[static_cast<size_t>(p)]) {
      throw std::invalid_argument(
          "expected_profile_payoff: strategy length mismatch for player " +
          std::to_string(p));
    }
  }

  std::vector<double> result(static_cast<size_t>(n), 0.0);
  std::vector<int> actions(static_cast<size_t>(n), 0);
  long prof = 0;
  do {
    double w = 1.0;
    for (PlayerId p = 0; p < n; ++p) {
      w *= strategies[static_cast<size_t>(p)][static_cast<size_t>(actions[static_cast<size_t>(p)])];
    }
    if (w != 0.0) {
      for (PlayerId p = 0; p < n; ++p) {
        result[static_cast<size_t>(p)] +=
            w * tensor.values[static_cast<size_t>(p)][static_cast<size_t>(prof)];
      }
    }
    ++prof;
  } while (next_profile(tensor.action_counts, actions));
  return result;
}

}  // namespace stocheq
