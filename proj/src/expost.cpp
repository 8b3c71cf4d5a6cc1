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

#include "stocheq/expost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stocheq/linalg.hpp"
#include "stocheq/parallel.hpp"
#include "stocheq/value_update.hpp"

namespace stocheq {

namespace {

constexpr double kTieTol = 1e-12;
constexpr int kMaxImprovementRounds = 10'000;
// Gains can only be negative through floating-point noise; anything beyond
// this is an internal inconsistency.
constexpr double kGainErrorFloor = -1e-6;

std::vector<StateId> trapped_rows(const BestResponseMdp& mdp,
                                  std::span<const double> p_policy) {
  const int n = mdp.n();
  std::vector<char> can_absorb(static_cast<size_t>(n), 0);
  std::vector<int> stack;
  for (int r = 0; r < n; ++r) {
    double row_sum = 0.0;
    for (int c = 0; c < n; ++c) row_sum += p_policy[static_cast<size_t>(r) * n + c];
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
      if (p_policy[static_cast<size_t>(r) * n + target] > 0.0) {
        can_absorb[static_cast<size_t>(r)] = 1;
        stack.push_back(r);
      }
    }
  }
  std::vector<StateId> trapped;
  for (int r = 0; r < n; ++r) {
    if (!can_absorb[static_cast<size_t>(r)]) trapped.push_back(mdp.states[static_cast<size_t>(r)]);
  }
  return trapped;
}

// Policy evaluation for a (possibly mixed) policy over the MDP.
std::vector<double> evaluate_mdp_policy(const BestResponseMdp& mdp,
                                        const std::vector<MixedStrategy>& policy) {
  const int n = mdp.n();
  std::vector<double> p_policy(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
  std::vector<double> r_policy(static_cast<size_t>(n), 0.0);
  for (int r = 0; r < n; ++r) {
    const auto& mix = policy[static_cast<size_t>(r)];
    for (int a = 0; a < mdp.action_counts[static_cast<size_t>(r)]; ++a) {
      const double w = mix[static_cast<size_t>(a)];
      if (w == 0.0) continue;
      r_policy[static_cast<size_t>(r)] += w * mdp.reward[static_cast<size_t>(r)][static_cast<size_t>(a)];
      const double* row =
          mdp.transition[static_cast<size_t>(r)].data() + static_cast<size_t>(a) * n;
      for (int c = 0; c < n; ++c) {
        p_policy[static_cast<size_t>(r) * n + c] += w * row[c];
      }
    }
  }

  const std::vector<StateId> trapped = trapped_rows(mdp, p_policy);
  if (!trapped.empty()) {
    throw NonAbsorbingChainError(
        "non-absorbing policy: " + std::to_string(trapped.size()) +
            " state(s) cannot reach a terminal state",
        trapped);
  }

  std::vector<double> system(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      system[static_cast<size_t>(r) * n + c] =
          (r == c ? 1.0 : 0.0) - p_policy[static_cast<size_t>(r) * n + c];
    }
  }
  return solve_dense(std::move(system), n, r_policy);
}

int pure_action_of(const MixedStrategy& mix) {
  for (size_t a = 0; a < mix.size(); ++a) {
    if (mix[a] >= 1.0 - kTieTol) return static_cast<int>(a);
  }
  return -1;
}

}  // namespace

BestResponseMdp build_best_response_mdp(const StochasticGame& game,
                                        const StrategyProfile& profile,
                                        PlayerId player) {
  if (player < 0 || player >= game.num_players()) {
    throw std::invalid_argument("build_best_response_mdp: player out of range");
  }
  const int num_players = game.num_players();

  BestResponseMdp mdp;
  mdp.player = player;
  mdp.states = game.nonterminal_states();
  mdp.row_of_state.assign(static_cast<size_t>(game.num_states()), -1);
  for (size_t r = 0; r < mdp.states.size(); ++r) {
    mdp.row_of_state[static_cast<size_t>(mdp.states[r])] = static_cast<int>(r);
  }
  const int n = mdp.n();
  mdp.action_counts.resize(static_cast<size_t>(n));
  mdp.transition.resize(static_cast<size_t>(n));
  mdp.reward.resize(static_cast<size_t>(n));

  for (int r = 0; r < n; ++r) {
    const StateId s = mdp.states[static_cast<size_t>(r)];
    const auto& counts = game.action_counts[static_cast<size_t>(s)];
    const auto& strategies = profile[static_cast<size_t>(s)];
    const int own_actions = counts[static_cast<size_t>(player)];
    mdp.action_counts[static_cast<size_t>(r)] = own_actions;
    mdp.transition[static_cast<size_t>(r)].assign(
        static_cast<size_t>(own_actions) * static_cast<size_t>(n), 0.0);
    mdp.reward[static_cast<size_t>(r)].assign(static_cast<size_t>(own_actions), 0.0);
    const bool has_rewards = !game.rewards[static_cast<size_t>(s)].empty();

    std::vector<int> actions(static_cast<size_t>(num_players), 0);
    long prof = 0;
    do {
      double w = 1.0;
      for (PlayerId j = 0; j < num_players; ++j) {
        if (j == player) continue;
        w *= strategies[static_cast<size_t>(j)][static_cast<size_t>(actions[static_cast<size_t>(j)])];
      }
      if (w != 0.0) {
        const int a = actions[static_cast<size_t>(player)];
        double& reward = mdp.reward[static_cast<size_t>(r)][static_cast<size_t>(a)];
        if (has_rewards) reward += w * game.reward(s, prof, player);
        double* row = mdp.transition[static_cast<size_t>(r)].data() +
                      static_cast<size_t>(a) * static_cast<size_t>(n);
        for (const OutcomeEntry& e : game.outcomes(s, prof)) {
          if (game.is_terminal(e.successor)) {
            reward += w * e.probability *
                      game.terminal_payoffs[static_cast<size_t>(e.successor)]
                                           [static_cast<size_t>(player)];
          } else {
            row[mdp.row_of_state[static_cast<size_t>(e.successor)]] += w * e.probability;
          }
        }
      }
      ++prof;
    } while (next_profile(counts, actions));
  }
  return mdp;
}

PolicyIterationResult policy_iteration(const BestResponseMdp& mdp,
                                       const std::vector<MixedStrategy>& initial_policy) {
  const int n = mdp.n();
  if (static_cast<int>(initial_policy.size()) != n) {
    throw std::invalid_argument("policy_iteration: initial policy must cover every state");
  }
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(initial_policy[static_cast<size_t>(r)].size()) !=
        mdp.action_counts[static_cast<size_t>(r)]) {
      throw std::invalid_argument("policy_iteration: initial policy shape mismatch");
    }
  }

  std::vector<MixedStrategy> current = initial_policy;
  // -1 marks rows where the incumbent policy is genuinely mixed.
  std::vector<int> incumbent(static_cast<size_t>(n));
  for (int r = 0; r < n; ++r) {
    incumbent[static_cast<size_t>(r)] = pure_action_of(current[static_cast<size_t>(r)]);
  }

  std::vector<double> values;
  for (int round = 1; round <= kMaxImprovementRounds; ++round) {
    values = evaluate_mdp_policy(mdp, current);

    bool changed = false;
    std::vector<int> next(static_cast<size_t>(n));
    for (int r = 0; r < n; ++r) {
      const int m = mdp.action_counts[static_cast<size_t>(r)];
      double best = -std::numeric_limits<double>::infinity();
      std::vector<double> q(static_cast<size_t>(m));
      for (int a = 0; a < m; ++a) {
        const double* row = mdp.transition[static_cast<size_t>(r)].data() +
                            static_cast<size_t>(a) * static_cast<size_t>(n);
        double acc = mdp.reward[static_cast<size_t>(r)][static_cast<size_t>(a)];
        for (int c = 0; c < n; ++c) acc += row[c] * values[static_cast<size_t>(c)];
        q[static_cast<size_t>(a)] = acc;
        best = std::max(best, acc);
      }
      const int cur = incumbent[static_cast<size_t>(r)];
      int pick;
      if (cur >= 0 && q[static_cast<size_t>(cur)] >= best - kTieTol) {
        pick = cur;  // keep the incumbent whenever it ties the maximum
      } else {
        pick = 0;
        while (q[static_cast<size_t>(pick)] < best - kTieTol) ++pick;
        changed = true;
      }
      next[static_cast<size_t>(r)] = pick;
    }

    if (!changed) {
      PolicyIterationResult result;
      result.policy = std::move(next);
      result.values = std::move(values);
      result.iterations = round;
      return result;
    }
    for (int r = 0; r < n; ++r) {
      auto& mix = current[static_cast<size_t>(r)];
      std::fill(mix.begin(), mix.end(), 0.0);
      mix[static_cast<size_t>(next[static_cast<size_t>(r)])] = 1.0;
      incumbent[static_cast<size_t>(r)] = next[static_cast<size_t>(r)];
    }
  }
  throw std::runtime_error("policy_iteration: did not terminate (internal error)");
}

ExPostResult ex_post_epsilon(const StochasticGame& game, const StrategyProfile& profile,
                             int workers) {
  const int n = game.num_players();
  const ValueTable baseline = evaluate_policy(game, create_transition_matrix(game, profile));

  ExPostResult result;
  result.gains.assign(static_cast<size_t>(n), 0.0);
  if (workers <= 0) workers = n;
  workers = std::min(workers, n);

  run_partitioned(n, workers, [&](int player) {
    const BestResponseMdp mdp = build_best_response_mdp(game, profile, player);
    std::vector<MixedStrategy> initial(static_cast<size_t>(mdp.n()));
    for (int r = 0; r < mdp.n(); ++r) {
      initial[static_cast<size_t>(r)] =
          profile[static_cast<size_t>(mdp.states[static_cast<size_t>(r)])]
                 [static_cast<size_t>(player)];
    }
    const PolicyIterationResult pi = policy_iteration(mdp, initial);
    const int start_row = mdp.row_of_state[static_cast<size_t>(game.initial_state)];
    double gain = pi.values[static_cast<size_t>(start_row)] -
                  baseline.at(game.initial_state, player);
    if (gain < kGainErrorFloor) {
      throw std::logic_error(
          "ex_post_epsilon: best response at the initial state is worse than the "
          "profile itself (gain " + std::to_string(gain) + ")");
    }
    if (gain < 0.0) gain = 0.0;
    result.gains[static_cast<size_t>(player)] = gain;
  });

  result.epsilon = *std::max_element(result.gains.begin(), result.gains.end());
  return result;
}

namespace {

// Deliberately self-contained evaluation used only by the brute-force
// oracle: assembles the absorbing chain where `player` follows `pure` (or its
// mixed entry in `profile` when pure is null) and solves it by Gauss-Jordan
// elimination. Shares no code with evaluate_policy / policy_iteration so the
// two routes stay independent checks of each other.
double oracle_value_at_start(const StochasticGame& game, const StrategyProfile& profile,
                             PlayerId player, const std::vector<int>* pure) {
  const std::vector<StateId> states = game.nonterminal_states();
  const int n = static_cast<int>(states.size());
  std::vector<int> row_of(static_cast<size_t>(game.num_states()), -1);
  for (int r = 0; r < n; ++r) row_of[static_cast<size_t>(states[static_cast<size_t>(r)])] = r;
  const int num_players = game.num_players();

  // Augmented system [I - P | r].
  const int stride = n + 1;
  std::vector<double> aug(static_cast<size_t>(n) * static_cast<size_t>(stride), 0.0);
  for (int r = 0; r < n; ++r) aug[static_cast<size_t>(r) * stride + r] = 1.0;

  for (int r = 0; r < n; ++r) {
    const StateId s = states[static_cast<size_t>(r)];
    const auto& counts = game.action_counts[static_cast<size_t>(s)];
    const auto& strategies = profile[static_cast<size_t>(s)];
    const bool has_rewards = !game.rewards[static_cast<size_t>(s)].empty();
    std::vector<int> actions(static_cast<size_t>(num_players), 0);
    long prof = 0;
    do {
      double w = 1.0;
      for (PlayerId j = 0; j < num_players; ++j) {
        if (j == player && pure != nullptr) {
          if (actions[static_cast<size_t>(j)] != (*pure)[static_cast<size_t>(r)]) {
            w = 0.0;
            break;
          }
        } else {
          w *= strategies[static_cast<size_t>(j)][static_cast<size_t>(actions[static_cast<size_t>(j)])];
        }
      }
      if (w != 0.0) {
        if (has_rewards) {
          aug[static_cast<size_t>(r) * stride + n] += w * game.reward(s, prof, player);
        }
        for (const OutcomeEntry& e : game.outcomes(s, prof)) {
          if (game.is_terminal(e.successor)) {
            aug[static_cast<size_t>(r) * stride + n] +=
                w * e.probability *
                game.terminal_payoffs[static_cast<size_t>(e.successor)]
                                     [static_cast<size_t>(player)];
          } else {
            aug[static_cast<size_t>(r) * stride +
                row_of[static_cast<size_t>(e.successor)]] -= w * e.probability;
          }
        }
      }
      ++prof;
    } while (next_profile(counts, actions));
  }

  for (int k = 0; k < n; ++k) {
    int pivot_row = k;
    for (int r = k + 1; r < n; ++r) {
      if (std::fabs(aug[static_cast<size_t>(r) * stride + k]) >
          std::fabs(aug[static_cast<size_t>(pivot_row) * stride + k])) {
        pivot_row = r;
      }
    }
    const double pivot = aug[static_cast<size_t>(pivot_row) * stride + k];
    if (std::fabs(pivot) < 1e-12) {
      throw std::runtime_error("brute_force_epsilon: non-absorbing deviation chain");
    }
    if (pivot_row != k) {
      for (int c = 0; c <= n; ++c) {
        std::swap(aug[static_cast<size_t>(k) * stride + c],
                  aug[static_cast<size_t>(pivot_row) * stride + c]);
      }
    }
    for (int r = 0; r < n; ++r) {
      if (r == k) continue;
      const double f = aug[static_cast<size_t>(r) * stride + k] / pivot;
      if (f == 0.0) continue;
      for (int c = k; c <= n; ++c) {
        aug[static_cast<size_t>(r) * stride + c] -= f * aug[static_cast<size_t>(k) * stride + c];
      }
    }
  }

  const int start_row = row_of[static_cast<size_t>(game.initial_state)];
  return aug[static_cast<size_t>(start_row) * stride + n] /
         aug[static_cast<size_t>(start_row) * stride + start_row];
}

}  // namespace

double brute_force_epsilon(const StochasticGame& game, const StrategyProfile& profile) {
  const std::vector<StateId> states = game.nonterminal_states();
  const int n = static_cast<int>(states.size());

  double epsilon = 0.0;
  for (PlayerId player = 0; player < game.num_players(); ++player) {
    double policies = 1.0;
    std::vector<int> counts(static_cast<size_t>(n));
    for (int r = 0; r < n; ++r) {
      counts[static_cast<size_t>(r)] =
          game.action_counts[static_cast<size_t>(states[static_cast<size_t>(r)])]
                            [static_cast<size_t>(player)];
      policies *= counts[static_cast<size_t>(r)];
    }
    if (policies > kBruteForceLimit) {
      throw std::invalid_argument(
          "brute_force_epsilon: player " + game.player_names[static_cast<size_t>(player)] +
          " has too many pure policies to enumerate");
    }

    const double baseline = oracle_value_at_start(game, profile, player, nullptr);
    double best = baseline;
    std::vector<int> pure(static_cast<size_t>(n), 0);
    do {
      best = std::max(best, oracle_value_at_start(game, profile, player, &pure));
    } while (next_profile(counts, pure));
    epsilon = std::max(epsilon, best - baseline);
  }
  return epsilon;
}

}  // namespace stocheq
