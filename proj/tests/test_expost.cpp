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

#include <doctest.h>

#include <cmath>

#include "stocheq/linalg.hpp"
#include "stocheq/stage_solver.hpp"
#include "stocheq/value_update.hpp"
#include "test_support.hpp"

using namespace stocheq;
using testing::GameBuilder;

namespace {

// One decision state for player 0 ("hero"): action 0 pays 0, action 1 pays
// 10; the opponent has no real choice.
struct PlantedDeviationGame {
  StochasticGame game;
  StateId start;

  PlantedDeviationGame() {
    GameBuilder builder({"hero", "bystander"});
    start = builder.add_state("G_0", {2, 1});
    const StateId low = builder.add_terminal("t_low", {0.0, 1.0});
    const StateId high = builder.add_terminal("t_high", {10.0, 1.0});
    builder.add_row(start, {{low, 1.0}});   // (0,0)
    builder.add_row(start, {{high, 1.0}});  // (1,0)
    game = builder.game;
  }

  StrategyProfile profile_playing(int hero_action) const {
    StrategyProfile profile(static_cast<size_t>(game.num_states()));
    MixedStrategy hero{0.0, 0.0};
    hero[static_cast<size_t>(hero_action)] = 1.0;
    profile[static_cast<size_t>(start)] = {hero, {1.0}};
    return profile;
  }
};

}  // namespace

TEST_CASE("best-response MDP slices the game when opponents have one action") {
  GameBuilder builder({"hero", "fixed"});
  const StateId s0 = builder.add_state("s0", {2, 1});
  const StateId s1 = builder.add_state("s1", {1, 1});
  const StateId sink = builder.add_terminal("t", {4.0, 0.0});
  builder.add_row(s0, {{s1, 0.7}, {sink, 0.3}});  // hero action 0
  builder.add_row(s0, {{sink, 1.0}});             // hero action 1
  builder.add_row(s1, {{sink, 1.0}});
  const auto& game = builder.game;

  const BestResponseMdp mdp =
      build_best_response_mdp(game, testing::uniform_profile(game), 0);
  REQUIRE(mdp.n() == 2);
  CHECK(mdp.action_counts[0] == 2);
  CHECK(mdp.transition[0][1] == doctest::Approx(0.7));  // action 0 -> s1
  CHECK(mdp.reward[0][0] == doctest::Approx(0.3 * 4.0));
  CHECK(mdp.transition[0][static_cast<size_t>(1) * 2 + 1] == doctest::Approx(0.0));
  CHECK(mdp.reward[0][1] == doctest::Approx(4.0));
}

TEST_CASE("single-action player's MDP evaluates to the profile value") {
  GameBuilder builder({"passive", "chooser"});
  const StateId s0 = builder.add_state("s0", {1, 2});
  const StateId s1 = builder.add_state("s1", {1, 2});
  const StateId sink = builder.add_terminal("t", {6.0, -6.0});
  builder.add_row(s0, {{s1, 0.5}, {sink, 0.5}});  // chooser action 0
  builder.add_row(s0, {{sink, 1.0}});             // chooser action 1
  builder.add_row(s1, {{s0, 0.25}, {sink, 0.75}});
  builder.add_row(s1, {{sink, 1.0}});
  const auto& game = builder.game;
  StrategyProfile profile = testing::uniform_profile(game);
  profile[static_cast<size_t>(s0)][1] = {0.4, 0.6};
  profile[static_cast<size_t>(s1)][1] = {0.9, 0.1};

  const ValueTable values = evaluate_policy(game, create_transition_matrix(game, profile));
  // With a single own action there is nothing to improve: the best-response
  // MDP for the passive player evaluates to the profile value itself.
  const BestResponseMdp mdp = build_best_response_mdp(game, profile, 0);
  std::vector<MixedStrategy> initial(static_cast<size_t>(mdp.n()), MixedStrategy{1.0});
  const PolicyIterationResult result = policy_iteration(mdp, initial);
  CHECK(result.iterations == 1);
  for (size_t r = 0; r < mdp.states.size(); ++r) {
    CHECK(result.values[r] ==
          doctest::Approx(values.at(mdp.states[r], 0)).epsilon(1e-9));
  }
}

TEST_CASE("marginalization over two mixed opponents, by hand") {
  GameBuilder builder({"hero", "left", "right"});
  const StateId s0 = builder.add_state("s0", {2, 2, 2});
  const StateId s1 = builder.add_state("s1", {1, 1, 1});
  const StateId t0 = builder.add_terminal("t0", {10.0, 0.0, 0.0});
  const StateId t1 = builder.add_terminal("t1", {0.0, 0.0, 0.0});
  // Profile order: (a0, a1, a2) with a2 fastest.
  // hero action 0: goes to s1 when the opponents match, else to t1.
  // hero action 1: always to t0.
  builder.add_row(s0, {{s1, 1.0}});  // (0,0,0)
  builder.add_row(s0, {{t1, 1.0}});  // (0,0,1)
  builder.add_row(s0, {{t1, 1.0}});  // (0,1,0)
  builder.add_row(s0, {{s1, 1.0}});  // (0,1,1)
  builder.add_row(s0, {{t0, 1.0}});  // (1,0,0)
  builder.add_row(s0, {{t0, 1.0}});  // (1,0,1)
  builder.add_row(s0, {{t0, 1.0}});  // (1,1,0)
  builder.add_row(s0, {{t0, 1.0}});  // (1,1,1)
  builder.add_row(s1, {{t1, 1.0}});
  const auto& game = builder.game;

  StrategyProfile profile = testing::uniform_profile(game);
  profile[static_cast<size_t>(s0)][1] = {0.8, 0.2};
  profile[static_cast<size_t>(s0)][2] = {0.25, 0.75};
  const BestResponseMdp mdp = build_best_response_mdp(game, profile, 0);

  // P(opponents match) = 0.8*0.25 + 0.2*0.75 = 0.35.
  const int n = mdp.n();
  CHECK(mdp.transition[0][static_cast<size_t>(0) * n + 1] == doctest::Approx(0.35));
  CHECK(mdp.reward[0][0] == doctest::Approx(0.0));
  CHECK(mdp.reward[0][1] == doctest::Approx(10.0));
}

TEST_CASE("policy iteration terminates immediately with nothing to improve") {
  GameBuilder builder({"solo"});
  const StateId s0 = builder.add_state("s0", {1});
  const StateId sink = builder.add_terminal("t", {5.0});
  builder.add_row(s0, {{sink, 1.0}});
  const auto& game = builder.game;
  const BestResponseMdp mdp =
      build_best_response_mdp(game, testing::uniform_profile(game), 0);
  const PolicyIterationResult result = policy_iteration(mdp, {{1.0}});
  CHECK(result.iterations == 1);
  CHECK(result.policy == std::vector<int>{0});
  CHECK(result.values[0] == doctest::Approx(5.0));
}

TEST_CASE("policy iteration matches exhaustive policy enumeration") {
  // Two states, two actions each; action effects chosen so the optimum is
  // not the all-zeros policy.
  GameBuilder builder({"solo"});
  const StateId s0 = builder.add_state("s0", {2});
  const StateId s1 = builder.add_state("s1", {2});
  const StateId sink = builder.add_terminal("t", {0.0});
  builder.add_row(s0, {{s1, 0.9}, {sink, 0.1}});
  builder.add_row(s0, {{sink, 1.0}});
  builder.add_row(s1, {{s0, 0.5}, {sink, 0.5}});
  builder.add_row(s1, {{sink, 1.0}});
  builder.set_rewards(s0, {1.0, 2.0});
  builder.set_rewards(s1, {4.0, 1.0});
  const auto& game = builder.game;
  const BestResponseMdp mdp =
      build_best_response_mdp(game, testing::uniform_profile(game), 0);

  // Enumerate all four pure policies and evaluate each one directly.
  std::vector<double> best(2, -1e300);
  for (int a0 = 0; a0 < 2; ++a0) {
    for (int a1 = 0; a1 < 2; ++a1) {
      std::vector<double> system = {
          1.0 - mdp.transition[0][static_cast<size_t>(a0) * 2 + 0],
          -mdp.transition[0][static_cast<size_t>(a0) * 2 + 1],
          -mdp.transition[1][static_cast<size_t>(a1) * 2 + 0],
          1.0 - mdp.transition[1][static_cast<size_t>(a1) * 2 + 1]};
      const auto v = solve_dense(std::move(system), 2,
                                 {mdp.reward[0][static_cast<size_t>(a0)],
                                  mdp.reward[1][static_cast<size_t>(a1)]});
      best[0] = std::max(best[0], v[0]);
      best[1] = std::max(best[1], v[1]);
    }
  }

  const PolicyIterationResult result =
      policy_iteration(mdp, {{0.5, 0.5}, {0.5, 0.5}});
  CHECK(result.values[0] == doctest::Approx(best[0]).epsilon(1e-9));
  CHECK(result.values[1] == doctest::Approx(best[1]).epsilon(1e-9));
}

TEST_CASE("an already-optimal pure initial policy is returned unchanged") {
  GameBuilder builder({"solo"});
  const StateId s0 = builder.add_state("s0", {2});
  const StateId sink = builder.add_terminal("t", {0.0});
  builder.add_row(s0, {{sink, 1.0}});
  builder.add_row(s0, {{sink, 1.0}});
  builder.set_rewards(s0, {1.0, 3.0});
  const auto& game = builder.game;
  const BestResponseMdp mdp =
      build_best_response_mdp(game, testing::uniform_profile(game), 0);
  const PolicyIterationResult result = policy_iteration(mdp, {{0.0, 1.0}});
  CHECK(result.iterations == 1);
  CHECK(result.policy == std::vector<int>{1});
  CHECK(result.values[0] == doctest::Approx(3.0));
}

TEST_CASE("non-absorbing policies are reported") {
  GameBuilder builder({"solo"});
  const StateId s0 = builder.add_state("s0", {2});
  const StateId sink = builder.add_terminal("t", {1.0});
  builder.add_row(s0, {{s0, 1.0}});    // action 0 loops forever
  builder.add_row(s0, {{sink, 1.0}});  // action 1 absorbs
  const auto& game = builder.game;
  const BestResponseMdp mdp =
      build_best_response_mdp(game, testing::uniform_profile(game), 0);
  CHECK_THROWS_WITH_AS(static_cast<void>(policy_iteration(mdp, {{1.0, 0.0}})),
                       doctest::Contains("non-absorbing"), NonAbsorbingChainError);
}

TEST_CASE("ex-post epsilon of a dominant-strategy equilibrium is zero") {
  PlantedDeviationGame planted;
  const ExPostResult result =
      ex_post_epsilon(planted.game, planted.profile_playing(1));
  CHECK(result.epsilon == doctest::Approx(0.0));
  CHECK(result.gains[0] == doctest::Approx(0.0));
  CHECK(result.gains[1] == doctest::Approx(0.0));
}

TEST_CASE("a planted deviation worth exactly 10 is measured exactly") {
  PlantedDeviationGame planted;
  const ExPostResult result =
      ex_post_epsilon(planted.game, planted.profile_playing(0));
  CHECK(result.epsilon == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(result.gains[0] == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("zero ex-post epsilon implies zero stage regret under evaluated values") {
  PlantedDeviationGame planted;
  const StrategyProfile profile = planted.profile_playing(1);
  const ValueTable values =
      evaluate_policy(planted.game, create_transition_matrix(planted.game, profile));
  for (StateId s : planted.game.nonterminal_states()) {
    const PayoffTensor tensor = build_payoff_tensor(planted.game, s, values);
    CHECK(max_regret(tensor, profile[static_cast<size_t>(s)]) <= 1e-6);
  }
}

TEST_CASE("brute force refuses oversized games") {
  GameBuilder builder({"solo"});
  std::vector<StateId> chain;
  for (int i = 0; i < 21; ++i) {
    chain.push_back(builder.add_state("s" + std::to_string(i), {2}));
  }
  const StateId sink = builder.add_terminal("t", {0.0});
  for (StateId s : chain) {
    builder.add_row(s, {{sink, 1.0}});
    builder.add_row(s, {{sink, 1.0}});
  }
  CHECK_THROWS_WITH_AS(
      static_cast<void>(brute_force_epsilon(builder.game,
                                            testing::uniform_profile(builder.game))),
      doctest::Contains("too many"), std::invalid_argument);
}

TEST_CASE("brute force agrees that single-action games have zero epsilon") {
  GameBuilder builder({"a", "b"});
  const StateId s0 = builder.add_state("s0", {1, 1});
  const StateId sink = builder.add_terminal("t", {1.0, -1.0});
  builder.add_row(s0, {{sink, 1.0}});
  CHECK(brute_force_epsilon(builder.game, testing::uniform_profile(builder.game)) ==
        doctest::Approx(0.0));
}

TEST_CASE("oracle equivalence on seeded tiny games") {
  // The acceptance suite runs 200+ of these; keep a fast slice in the unit
  // tests so regressions surface here first.
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const StochasticGame game = testing::random_tiny_game(seed);
    const StrategyProfile profile = testing::random_profile(game, seed * 1000 + 17);
    const double expected = brute_force_epsilon(game, profile);
    const ExPostResult actual = ex_post_epsilon(game, profile);
    CHECK(std::fabs(actual.epsilon - expected) <= 1e-9);
  }
}

TEST_CASE("ex_post_epsilon is deterministic across worker counts") {
  const StochasticGame game = testing::random_tiny_game(40);
  const StrategyProfile profile = testing::random_profile(game, 41);
  const ExPostResult one = ex_post_epsilon(game, profile, 1);
  const ExPostResult many = ex_post_epsilon(game, profile, 8);
  CHECK(one.epsilon == many.epsilon);
  CHECK(one.gains == many.gains);
}
