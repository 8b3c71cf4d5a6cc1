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

#include "stocheq/stage_solver.hpp"

#include <algorithm>
#include <stdexcept>

#include "stocheq/rng.hpp"

namespace stocheq {

namespace {

void check_strategies(const PayoffTensor& tensor, const StateStrategies& strategies,
                      PlayerId skip = -1) {
  if (static_cast<int>(strategies.size()) != tensor.num_players()) {
    throw std::invalid_argument("stage solver: wrong number of strategies");
  }
  for (PlayerId p = 0; p < tensor.num_players(); ++p) {
    if (p == skip) continue;
    if (static_cast<int>(strategies[static_cast<size_t>(p)].size()) !=
        tensor.action_counts[static_cast<size_t>(p)]) {
      throw std::invalid_argument("stage solver: strategy length mismatch for player " +
                                  std::to_string(p));
    }
  }
}

// Expected payoff of each of `player`'s actions against the product of the
// other players' strategies; the generic path used outside the FP hot loop.
std::vector<double> action_payoffs(const PayoffTensor& tensor,
                                   const StateStrategies& strategies,
                                   PlayerId player) {
  const int n = tensor.num_players();
  std::vector<double> pay(
      static_cast<size_t>(tensor.action_counts[static_cast<size_t>(player)]), 0.0);
  std::vector<int> actions(static_cast<size_t>(n), 0);
  long prof = 0;
  do {
    double w = 1.0;
    for (PlayerId p = 0; p < n; ++p) {
      if (p == player) continue;
      w *= strategies[static_cast<size_t>(p)][static_cast<size_t>(actions[static_cast<size_t>(p)])];
    }
    if (w != 0.0) {
      pay[static_cast<size_t>(actions[static_cast<size_t>(player)])] +=
          w * tensor.values[static_cast<size_t>(player)][static_cast<size_t>(prof)];
    }
    ++prof;
  } while (next_profile(tensor.action_counts, actions));
  return pay;
}

int argmax_lowest(std::span<const double> values) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(values.size()); ++a) {
    if (values[static_cast<size_t>(a)] > values[static_cast<size_t>(best)]) best = a;
  }
  return best;
}

// The FP loop touches every (own action, opponent profile) cell of every
// player's tensor each round, so each player's payoffs are transposed once so
// that the own action is the leading axis and the round becomes plain dot
// products against an opponent-profile weight vector.
struct FpWorkspace {
  int n = 0;
  std::vector<int> counts;
  std::vector<long> opp_profiles;                    // per player
  std::vector<std::vector<double>> own_major;        // [player][a * opp + k]
  std::vector<std::vector<double>> weights;          // per player, size opp
  std::vector<std::vector<double>> payoffs;          // per player, size counts[p]

  explicit FpWorkspace(const PayoffTensor& tensor)
      : n(tensor.num_players()), counts(tensor.action_counts) {
    const long total = tensor.num_profiles();
    opp_profiles.resize(static_cast<size_t>(n));
    own_major.resize(static_cast<size_t>(n));
    weights.resize(static_cast<size_t>(n));
    payoffs.resize(static_cast<size_t>(n));
    for (PlayerId p = 0; p < n; ++p) {
      opp_profiles[static_cast<size_t>(p)] = total / counts[static_cast<size_t>(p)];
      own_major[static_cast<size_t>(p)].resize(static_cast<size_t>(total));
      weights[static_cast<size_t>(p)].resize(
          static_cast<size_t>(opp_profiles[static_cast<size_t>(p)]));
      payoffs[static_cast<size_t>(p)].resize(static_cast<size_t>(counts[static_cast<size_t>(p)]));
    }
    // own_major[p][a_p * opp + k]: k runs over the other players' actions in
    // ascending player order, last one fastest (matching build_weights).
    std::vector<int> actions(static_cast<size_t>(n), 0);
    long prof = 0;
    do {
      for (PlayerId p = 0; p < n; ++p) {
        long k = 0;
        for (PlayerId j = 0; j < n; ++j) {
          if (j == p) continue;
          k = k * counts[static_cast<size_t>(j)] + actions[static_cast<size_t>(j)];
        }
        own_major[static_cast<size_t>(p)]
                 [static_cast<size_t>(actions[static_cast<size_t>(p)]) *
                      static_cast<size_t>(opp_profiles[static_cast<size_t>(p)]) +
                  static_cast<size_t>(k)] =
            tensor.values[static_cast<size_t>(p)][static_cast<size_t>(prof)];
      }
      ++prof;
    } while (next_profile(counts, actions));
  }

  // Outer product of the opponents' strategies, ascending player order.
  void build_weights(PlayerId p, const StateStrategies& strategies) {
    auto& w = weights[static_cast<size_t>(p)];
    w[0] = 1.0;
    long filled = 1;
    for (PlayerId j = 0; j < n; ++j) {
      if (j == p) continue;
      const auto& sj = strategies[static_cast<size_t>(j)];
      const int mj = counts[static_cast<size_t>(j)];
      for (long t = filled; t-- > 0;) {
        const double base = w[static_cast<size_t>(t)];
        for (int a = mj; a-- > 0;) {
          w[static_cast<size_t>(t) * mj + static_cast<size_t>(a)] =
              base * sj[static_cast<size_t>(a)];
        }
      }
      filled *= mj;
    }
  }

  // Fills payoffs[p] for every player against `strategies` and returns the
  // max regret of `strategies` itself.
  double round_payoffs(const StateStrategies& strategies) {
    double regret = 0.0;
    for (PlayerId p = 0; p < n; ++p) {
      build_weights(p, strategies);
      const auto& w = weights[static_cast<size_t>(p)];
      const auto& tp = own_major[static_cast<size_t>(p)];
      auto& pay = payoffs[static_cast<size_t>(p)];
      const long opp = opp_profiles[static_cast<size_t>(p)];
      for (int a = 0; a < counts[static_cast<size_t>(p)]; ++a) {
        double acc = 0.0;
        const double* row = tp.data() + static_cast<size_t>(a) * static_cast<size_t>(opp);
        for (long k = 0; k < opp; ++k) acc += row[k] * w[static_cast<size_t>(k)];
        pay[static_cast<size_t>(a)] = acc;
      }
      double mixed = 0.0;
      double best = pay[0];
      const auto& sp = strategies[static_cast<size_t>(p)];
      for (int a = 0; a < counts[static_cast<size_t>(p)]; ++a) {
        mixed += sp[static_cast<size_t>(a)] * pay[static_cast<size_t>(a)];
        best = std::max(best, pay[static_cast<size_t>(a)]);
      }
      regret = std::max(regret, best - mixed);
    }
    return std::max(regret, 0.0);
  }
};

}  // namespace

std::pair<int, double> best_response(const PayoffTensor& tensor,
                                     const StateStrategies& strategies,
                                     PlayerId player) {
  if (player < 0 || player >= tensor.num_players()) {
    throw std::invalid_argument("best_response: player out of range");
  }
  check_strategies(tensor, strategies, player);
  const std::vector<double> pay = action_payoffs(tensor, strategies, player);
  const int a = argmax_lowest(pay);
  return {a, pay[static_cast<size_t>(a)]};
}

MixedStrategy fp_update(const MixedStrategy& average, int br_action, long t) {
  if (t < 1) throw std::invalid_argument("fp_update: t must be >= 1");
  if (br_action < 0 || br_action >= static_cast<int>(average.size())) {
    throw std::invalid_argument("fp_update: best-response action out of range");
  }
  const double keep = 1.0 - 1.0 / static_cast<double>(t);
  MixedStrategy next(average.size());
  for (size_t a = 0; a < average.size(); ++a) next[a] = keep * average[a];
  next[static_cast<size_t>(br_action)] += 1.0 / static_cast<double>(t);
  return next;
}

double max_regret(const PayoffTensor& tensor, const StateStrategies& strategies) {
  check_strategies(tensor, strategies);
  double regret = 0.0;
  for (PlayerId p = 0; p < tensor.num_players(); ++p) {
    const std::vector<double> pay = action_payoffs(tensor, strategies, p);
    double mixed = 0.0;
    double best = pay[0];
    for (size_t a = 0; a < pay.size(); ++a) {
      mixed += strategies[static_cast<size_t>(p)][a] * pay[a];
      best = std::max(best, pay[a]);
    }
    regret = std::max(regret, best - mixed);
  }
  return std::max(regret, 0.0);
}

StateStrategies uniform_strategies(const PayoffTensor& tensor) {
  StateStrategies out(static_cast<size_t>(tensor.num_players()));
  for (PlayerId p = 0; p < tensor.num_players(); ++p) {
    const int m = tensor.action_counts[static_cast<size_t>(p)];
    out[static_cast<size_t>(p)].assign(static_cast<size_t>(m), 1.0 / m);
  }
  return out;
}

StateStrategies random_strategies(const PayoffTensor& tensor, std::uint64_t seed) {
  SplitMix64 rng(seed);
  StateStrategies out(static_cast<size_t>(tensor.num_players()));
  for (PlayerId p = 0; p < tensor.num_players(); ++p) {
    out[static_cast<size_t>(p)] =
        rng.next_simplex(tensor.action_counts[static_cast<size_t>(p)]);
  }
  return out;
}

StageSolution solve_stage_game(const PayoffTensor& tensor,
                               const StoppingCondition& stop,
                               const StateStrategies* init) {
  if (stop.kind != StoppingCondition::Kind::kRegretThreshold && stop.iterations < 1) {
    throw std::invalid_argument("solve_stage_game: iteration budget must be >= 1");
  }
  if (stop.gamma < 0.0) {
    throw std::invalid_argument("solve_stage_game: regret threshold must be >= 0");
  }

  StateStrategies averages = init ? *init : uniform_strategies(tensor);
  check_strategies(tensor, averages);

  FpWorkspace ws(tensor);
  const bool track_min = stop.kind == StoppingCondition::Kind::kFixedIterationsMinRegret;
  const long budget = stop.kind == StoppingCondition::Kind::kRegretThreshold
                          ? kMaxFpIterations
                          : stop.iterations;

  StateStrategies best_profile;
  double best_regret = 0.0;
  bool have_best = false;

  long t = 1;
  for (; t <= budget; ++t) {
    // Payoffs against the averages from round t-1; their regret is the
    // regret of the profile as it currently stands.
    const double regret = ws.round_payoffs(averages);
    if (stop.kind == StoppingCondition::Kind::kRegretThreshold && regret <= stop.gamma) {
      return {std::move(averages), regret, t - 1};
    }
    if (track_min && t > 1 && (!have_best || regret < best_regret)) {
      // averages here are the round t-1 iterate; the initial profile itself
      // does not compete.
      best_profile = averages;
      best_regret = regret;
      have_best = true;
    }
    for (PlayerId p = 0; p < ws.n; ++p) {
      const int br = argmax_lowest(ws.payoffs[static_cast<size_t>(p)]);
      averages[static_cast<size_t>(p)] =
          fp_update(averages[static_cast<size_t>(p)], br, t);
    }
  }

  const double final_regret = ws.round_payoffs(averages);
  if (stop.kind == StoppingCondition::Kind::kRegretThreshold) {
    // Iteration cap exhausted; non-convergence is reported via the regret.
    return {std::move(averages), final_regret, budget};
  }
  if (track_min && have_best && best_regret < final_regret) {
    return {std::move(best_profile), best_regret, budget};
  }
  return {std::move(averages), final_regret, budget};
}

}  // namespace stocheq
