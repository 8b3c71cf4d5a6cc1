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

#include "stocheq/value_update.hpp"

#include <cmath>

#include "stocheq/linalg.hpp"

namespace stocheq {

namespace {

void check_profile(const StochasticGame& game, const StrategyProfile& profile) {
  if (static_cast<int>(profile.size()) != game.num_states()) {
    throw std::invalid_argument("strategy profile does not cover all states");
  }
  for (StateId s = 0; s < game.num_states(); ++s) {
    if (game.is_terminal(s)) continue;
    const auto& at_state = profile[static_cast<size_t>(s)];
    if (static_cast<int>(at_state.size()) != game.num_players()) {
      throw std::invalid_argument("strategy profile missing players at state " +
                                  game.state_names[static_cast<size_t>(s)]);
    }
    for (PlayerId p = 0; p < game.num_players(); ++p) {
      if (static_cast<int>(at_state[static_cast<size_t>(p)].size()) !=
          game.action_counts[static_cast<size_t>(s)][static_cast<size_t>(p)]) {
        throw std::invalid_argument("strategy length mismatch at state " +
                                    game.state_names[static_cast<size_t>(s)]);
      }
    }
  }
}

// Rows with no path to an absorbing transition make (I - P) singular; find
// them by walking reachability backwards from rows with a positive deficit.
std::vector<StateId> trapped_states(const InducedChain& chain) {
  const int n = chain.n();
  std::vector<char> can_absorb(static_cast<size_t>(n), 0);
  std::vector<int> stack;
  for (int r = 0; r < n; ++r) {
    double row_sum = 0.0;
    for (int c = 0; c < n; ++c) row_sum += chain.p[static_cast<size_t>(r) * n + c];
    if (1.0 - row_sum > 1e-9) {
      can_absorb[static_cast<size_t>(r)] = 1;
      stack.push_back(r);
    }
  }
  while (!stack.empty()) {
    const int target = stack.back();
    stack.pop_back();
    for (int r = 0; r < n; ++r) {
      if (can_absorb[static_cast<size_t>(r)]) continue;
      if (chain.p[static_cast<size_t>(r) * n + target] > 0.0) {
        can_absorb[static_cast<size_t>(r)] = 1;
        stack.push_back(r);
      }
    }
  }
  std::vector<StateId> trapped;
  for (int r = 0; r < n; ++r) {
    if (!can_absorb[static_cast<size_t>(r)]) trapped.push_back(chain.states[static_cast<size_t>(r)]);
  }
  return trapped;
}

std::string name_states(const StochasticGame& game, const std::vector<StateId>& states) {
  std::string out;
  for (size_t i = 0; i < states.size(); ++i) {
    if (i > 0) out += ", ";
    out += game.state_names[static_cast<size_t>(states[i])];
  }
  return out;
}

}  // namespace

ValueTable value_iteration_update(const StochasticGame& game,
                                  const StrategyProfile& profile,
                                  const ValueTable& values) {
  check_profile(game, profile);
  ValueTable next = values;
  for (StateId s = 0; s < game.num_states(); ++s) {
    if (game.is_terminal(s)) continue;
    const PayoffTensor tensor = build_payoff_tensor(game, s, values);
    const std::vector<double> expected =
        expected_profile_payoff(tensor, profile[static_cast<size_t>(s)]);
    for (PlayerId p = 0; p < game.num_players(); ++p) {
      next.at(s, p) = expected[static_cast<size_t>(p)];
    }
  }
  return next;
}

InducedChain create_transition_matrix(const StochasticGame& game,
                                      const StrategyProfile& profile) {
  check_profile(game, profile);
  const int num_players = game.num_players();

  InducedChain chain;
  chain.states = game.nonterminal_states();
  chain.row_of_state.assign(static_cast<size_t>(game.num_states()), -1);
  for (size_t r = 0; r < chain.states.size(); ++r) {
    chain.row_of_state[static_cast<size_t>(chain.states[r])] = static_cast<int>(r);
  }
  const int n = chain.n();
  chain.p.assign(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
  chain.absorb.assign(static_cast<size_t>(num_players),
                      std::vector<double>(static_cast<size_t>(n), 0.0));

  for (int r = 0; r < n; ++r) {
    const StateId s = chain.states[static_cast<size_t>(r)];
    const auto& strategies = profile[static_cast<size_t>(s)];
    const auto& counts = game.action_counts[static_cast<size_t>(s)];
    const bool has_rewards = !game.rewards[static_cast<size_t>(s)].empty();

    std::vector<int> actions(static_cast<size_t>(num_players), 0);
    long prof = 0;
    do {
      double w = 1.0;
      for (PlayerId p = 0; p < num_players; ++p) {
        w *= strategies[static_cast<size_t>(p)][static_cast<size_t>(actions[static_cast<size_t>(p)])];
      }
      if (w != 0.0) {
        if (has_rewards) {
          for (PlayerId p = 0; p < num_players; ++p) {
            chain.absorb[static_cast<size_t>(p)][static_cast<size_t>(r)] +=
                w * game.reward(s, prof, p);
          }
        }
        for (const OutcomeEntry& e : game.outcomes(s, prof)) {
          if (game.is_terminal(e.successor)) {
            const auto& payoff = game.terminal_payoffs[static_cast<size_t>(e.successor)];
            for (PlayerId p = 0; p < num_players; ++p) {
              chain.absorb[static_cast<size_t>(p)][static_cast<size_t>(r)] +=
                  w * e.probability * payoff[static_cast<size_t>(p)];
            }
          } else {
            const int c = chain.row_of_state[static_cast<size_t>(e.successor)];
            chain.p[static_cast<size_t>(r) * n + c] += w * e.probability;
          }
        }
      }
      ++prof;
    } while (next_profile(counts, actions));
  }
  return chain;
}

ValueTable evaluate_policy(const StochasticGame& game, const InducedChain& chain) {
  const int n = chain.n();
  const int num_players = game.num_players();

  {
    const std::vector<StateId> trapped = trapped_states(chain);
    if (!trapped.empty()) {
      throw NonAbsorbingChainError(
          "non-absorbing chain: state(s) " + name_states(game, trapped) +
              " cannot reach a terminal state under this profile",
          trapped);
    }
  }

  // I - P, one factorization shared by all per-player right-hand sides.
  std::vector<double> system(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double p = chain.p[static_cast<size_t>(r) * n + c];
      system[static_cast<size_t>(r) * n + c] = (r == c ? 1.0 : 0.0) - p;
    }
  }

  ValueTable values = make_value_table(game, 0.0);
  try {
    const LuFactorization lu(system, n);
    for (PlayerId p = 0; p < num_players; ++p) {
      const auto& rhs = chain.absorb[static_cast<size_t>(p)];
      std::vector<double> v = lu.solve(rhs);
      double residual = residual_inf_norm(system, n, v, rhs);
      if (residual > kBellmanResidualTol) {
        // One step of iterative refinement with the existing factorization.
        std::vector<double> defect(static_cast<size_t>(n));
        for (int r = 0; r < n; ++r) {
          double acc = rhs[static_cast<size_t>(r)];
          for (int c = 0; c < n; ++c) {
            acc -= system[static_cast<size_t>(r) * n + c] * v[static_cast<size_t>(c)];
          }
          defect[static_cast<size_t>(r)] = acc;
        }
        const std::vector<double> correction = lu.solve(defect);
        for (int r = 0; r < n; ++r) v[static_cast<size_t>(r)] += correction[static_cast<size_t>(r)];
        residual = residual_inf_norm(system, n, v, rhs);
        if (residual > kBellmanResidualTol) {
          throw NonAbsorbingChainError(
              "non-absorbing chain: policy evaluation residual " +
                  std::to_string(residual) + " exceeds tolerance (near-singular system)",
              {});
        }
      }
      for (int r = 0; r < n; ++r) {
        values.at(chain.states[static_cast<size_t>(r)], p) = v[static_cast<size_t>(r)];
      }
    }
  } catch (const SingularMatrixError& e) {
    const StateId state = chain.states[static_cast<size_t>(e.column)];
    throw NonAbsorbingChainError(
        "non-absorbing chain: evaluation system singular near state " +
            game.state_names[static_cast<size_t>(state)] + " (" + e.what() + ")",
        {state});
  }
  return values;
}

double max_dev(const ValueTable& a, const ValueTable& b) {
  if (a.players != b.players || a.values.size() != b.values.size()) {
    throw std::invalid_argument("max_dev: value tables differ in shape");
  }
  double worst = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    worst = std::max(worst, std::fabs(a.values[i] - b.values[i]));
  }
  return worst;
}

}  // namespace stocheq
