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

#include "stocheq/orchestrator.hpp"

#include <doctest.h>

#include <cmath>

#include "stocheq/expost.hpp"
#include "stocheq/hostility.hpp"
#include "stocheq/value_update.hpp"
#include "test_support.hpp"

using namespace stocheq;
using testing::GameBuilder;

namespace {

SolverConfig quick_config(SolverConfig::Algorithm algorithm, long fp_iters,
                          int outer_iters, int workers = 1) {
  SolverConfig config;
  config.algorithm = algorithm;
  config.stage_stop = StoppingCondition::fixed(fp_iters);
  config.max_outer_iterations = outer_iters;
  config.workers = workers;
  return config;
}

// One nonterminal state whose every profile absorbs immediately, so the
// whole game is a single stage game.
StochasticGame one_stage_game() {
  GameBuilder builder({"a", "b"});
  const StateId s0 = builder.add_state("G_0", {2, 2});
  const StateId t0 = builder.add_terminal("t0", {3.0, -1.0});
  const StateId t1 = builder.add_terminal("t1", {-2.0, 4.0});
  builder.add_row(s0, {{t0, 1.0}});
  builder.add_row(s0, {{t1, 1.0}});
  builder.add_row(s0, {{t0, 0.5}, {t1, 0.5}});
  builder.add_row(s0, {{t1, 1.0}});
  return builder.game;
}

}  // namespace

TEST_CASE("partition_states splits evenly with the remainder up front") {
  std::vector<StateId> nine(9);
  for (int i = 0; i < 9; ++i) nine[static_cast<size_t>(i)] = i;
  auto chunks = partition_states(nine, 3);
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0].size() == 3);
  CHECK(chunks[1].size() == 3);
  CHECK(chunks[2].size() == 3);

  std::vector<StateId> ten(10);
  for (int i = 0; i < 10; ++i) ten[static_cast<size_t>(i)] = i;
  chunks = partition_states(ten, 3);
  CHECK(chunks[0].size() == 4);
  CHECK(chunks[1].size() == 3);
  CHECK(chunks[2].size() == 3);

  chunks = partition_states(ten, 1);
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0] == ten);
}

TEST_CASE("partition_states covers every state exactly once for many shapes") {
  for (int n : {1, 2, 7, 16}) {
    std::vector<StateId> states(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) states[static_cast<size_t>(i)] = i * 2;
    for (int d : {1, 2, 3, 5, 40}) {
      const auto chunks = partition_states(states, d);
      REQUIRE(static_cast<int>(chunks.size()) == d);
      std::vector<StateId> flattened;
      size_t largest = 0, smallest = states.size();
      for (const auto& chunk : chunks) {
        flattened.insert(flattened.end(), chunk.begin(), chunk.end());
        largest = std::max(largest, chunk.size());
        smallest = std::min(smallest, chunk.size());
      }
      CHECK(flattened == states);
      CHECK(largest - smallest <= 1);
    }
  }
}

TEST_CASE("solve_all_stages is independent of the worker count") {
  const auto spec = generate_default_spec(8, SizeProfile::kSmall);
  const StochasticGame game = build_hostility_game(spec);
  const ValueTable values = make_value_table(game, 0.0);
  const auto stop = StoppingCondition::fixed(200);

  const StageSolveResult one = solve_all_stages(game, values, stop, 1);
  const StageSolveResult two = solve_all_stages(game, values, stop, 2);
  const StageSolveResult eight = solve_all_stages(game, values, stop, 8);
  CHECK(one.profile == two.profile);
  CHECK(one.profile == eight.profile);
  CHECK(one.regrets == two.regrets);
  CHECK(one.regrets == eight.regrets);
}

TEST_CASE("stage-solving failures carry the state name") {
  const StochasticGame game = one_stage_game();
  const ValueTable values = make_value_table(game, 0.0);
  StoppingCondition bad = StoppingCondition::fixed(0);  // invalid budget
  CHECK_THROWS_WITH_AS(
      static_cast<void>(solve_all_stages(game, values, bad, 2)),
      doctest::Contains("G_0"), std::runtime_error);
}

TEST_CASE("a single-stage game reduces to one stage solve") {
  const StochasticGame game = one_stage_game();
  SolverConfig config = quick_config(SolverConfig::Algorithm::kViFp, 2'000, 1);
  const ConvergenceReport report = run_vi_fp(game, config);
  REQUIRE(report.iterations_run() == 1);

  const StageSolveResult stage = solve_all_stages(game, make_value_table(game, 0.0),
                                                  config.stage_stop, 1);
  REQUIRE(report.iterations[0].epsilon.has_value());
  CHECK(std::fabs(*report.iterations[0].epsilon -
                  stage.regrets[static_cast<size_t>(game.initial_state)]) <= 1e-9);

  // With a single fully absorbing state the VI and PI updates coincide.
  config.algorithm = SolverConfig::Algorithm::kPiFp;
  const ConvergenceReport pi_report = run_pi_fp(game, config);
  CHECK(pi_report.final_profile == report.final_profile);
  CHECK(pi_report.iterations[0].epsilon == report.iterations[0].epsilon);
  CHECK(pi_report.iterations[0].max_value_dev ==
        doctest::Approx(report.iterations[0].max_value_dev));
}

TEST_CASE("VI-FP converges within the chain depth on a forced chain") {
  // Single move each, hostility sum 5, K = 10: value information needs two
  // backward steps, so the third iteration sees no change and halts.
  HostilityGameSpec spec;
  spec.players = {{"Blue", true}, {"Warship", false}};
  spec.moves = {{"B1"}, {"W1"}};
  spec.counters = {{}, {{}}};
  spec.b_def = {{}, {0.0}};
  spec.b_undef = {{}, {0.0}};
  spec.r_def = {{}, {0.0}};
  spec.r_undef = {{}, {0.0}};
  spec.blue_win_payoff = {100.0, -100.0};
  spec.red_win_payoff = {-100.0, 100.0};
  spec.kinetic_payoff = {-200.0, -200.0};
  spec.hostility = {{3.0}, {2.0}};
  spec.kinetic_threshold = 10.0;
  const StochasticGame game = build_hostility_game(spec);

  const ConvergenceReport report =
      run_vi_fp(game, quick_config(SolverConfig::Algorithm::kViFp, 10, 6));
  CHECK(report.converged);
  CHECK(report.iterations_run() <= 3);
  CHECK(report.final_values.at(game.initial_state, 0) == doctest::Approx(-200.0));
}

TEST_CASE("reports carry one record per outer iteration") {
  const auto spec = generate_default_spec(8, SizeProfile::kSmall);
  const StochasticGame game = build_hostility_game(spec);
  const ConvergenceReport report =
      run_pi_fp(game, quick_config(SolverConfig::Algorithm::kPiFp, 300, 4, 2));
  CHECK(report.iterations_run() >= 1);
  CHECK(report.iterations_run() <= 4);
  for (const IterationRecord& record : report.iterations) {
    REQUIRE(record.epsilon.has_value());
    CHECK(*record.epsilon >= 0.0);
    CHECK(std::isfinite(*record.epsilon));
    CHECK(record.max_value_dev >= 0.0);
    CHECK(record.millis >= 0);
  }
  CHECK(report.final_profile.size() == static_cast<size_t>(game.num_states()));
}

TEST_CASE("worker count changes nothing but the clock") {
  const auto spec = generate_default_spec(14, SizeProfile::kSmall);
  const StochasticGame game = build_hostility_game(spec);

  ConvergenceReport reports[3];
  const int worker_counts[3] = {1, 2, 6};
  for (int i = 0; i < 3; ++i) {
    reports[i] = run_pi_fp(
        game, quick_config(SolverConfig::Algorithm::kPiFp, 400, 3, worker_counts[i]));
  }
  for (int i = 1; i < 3; ++i) {
    CHECK(reports[i].final_profile == reports[0].final_profile);
    CHECK(reports[i].final_values.values == reports[0].final_values.values);
    CHECK(reports[i].converged == reports[0].converged);
    REQUIRE(reports[i].iterations_run() == reports[0].iterations_run());
    for (int k = 0; k < reports[0].iterations_run(); ++k) {
      CHECK(reports[i].iterations[static_cast<size_t>(k)].epsilon ==
            reports[0].iterations[static_cast<size_t>(k)].epsilon);
      CHECK(reports[i].iterations[static_cast<size_t>(k)].max_value_dev ==
            reports[0].iterations[static_cast<size_t>(k)].max_value_dev);
    }
  }
}

TEST_CASE("converged PI-FP output agrees with the brute-force oracle") {
  // Small enough (13 states, two moves each) for policy enumeration.
  const StochasticGame game = build_hostility_game(testing::tiny_hostility_spec());
  SolverConfig config = quick_config(SolverConfig::Algorithm::kPiFp, 2'000, 10, 2);
  const ConvergenceReport report = run_pi_fp(game, config);
  CHECK(report.converged);
  const double oracle = brute_force_epsilon(game, report.final_profile);
  CHECK(std::fabs(report.final_epsilon - oracle) <= 1e-6);
}

TEST_CASE("recorded epsilon reproduces offline from the dumped profile") {
  const auto spec = generate_default_spec(2, SizeProfile::kSmall);
  const StochasticGame game = build_hostility_game(spec);
  const ConvergenceReport report =
      run_pi_fp(game, quick_config(SolverConfig::Algorithm::kPiFp, 250, 3));
  const ExPostResult offline = ex_post_epsilon(game, report.final_profile);
  CHECK(std::fabs(offline.epsilon - report.final_epsilon) <= 1e-12);
}

TEST_CASE("disabling the epsilon trace still reports the final epsilon") {
  const auto spec = generate_default_spec(2, SizeProfile::kSmall);
  const StochasticGame game = build_hostility_game(spec);
  SolverConfig config = quick_config(SolverConfig::Algorithm::kPiFp, 250, 3);
  config.epsilon_trace = false;
  const ConvergenceReport report = run_pi_fp(game, config);
  REQUIRE(report.iterations_run() >= 1);
  for (int i = 0; i + 1 < report.iterations_run(); ++i) {
    CHECK_FALSE(report.iterations[static_cast<size_t>(i)].epsilon.has_value());
  }
  CHECK(report.iterations.back().epsilon.has_value());
  CHECK(*report.iterations.back().epsilon == report.final_epsilon);
}

TEST_CASE("a profile-induced non-absorbing chain names the outer iteration") {
  GameBuilder builder({"solo"});
  const StateId s0 = builder.add_state("s0", {1});
  builder.add_terminal("t", {1.0});
  builder.add_row(s0, {{s0, 1.0}});
  const StochasticGame& game = builder.game;
  CHECK_THROWS_WITH_AS(
      static_cast<void>(run_pi_fp(game, quick_config(SolverConfig::Algorithm::kPiFp, 10, 2))),
      doctest::Contains("outer iteration 1"), NonAbsorbingChainError);
}

TEST_CASE("pessimistic initialization starts at the lowest terminal payoff") {
  const StochasticGame game = one_stage_game();
  SolverConfig config = quick_config(SolverConfig::Algorithm::kViFp, 10, 1);
  config.initial_values = SolverConfig::InitialValues::kPessimistic;
  const ConvergenceReport report = run_vi_fp(game, config);
  CHECK(report.iterations_run() == 1);

  SolverConfig custom = config;
  custom.initial_values = SolverConfig::InitialValues::kCustom;
  custom.custom_initial_values = make_value_table(game, -2.0);
  const ConvergenceReport custom_report = run_vi_fp(game, custom);
  // Both runs see tensors built from (-2, -2) continuation values.
  CHECK(custom_report.final_profile == report.final_profile);
}

TEST_CASE("config validation") {
  const StochasticGame game = one_stage_game();
  SolverConfig config = quick_config(SolverConfig::Algorithm::kPiFp, 10, 0);
  CHECK_THROWS_AS(static_cast<void>(run_pi_fp(game, config)), std::invalid_argument);
  config = quick_config(SolverConfig::Algorithm::kPiFp, 10, 1);
  config.workers = 0;
  CHECK_THROWS_AS(static_cast<void>(run_pi_fp(game, config)), std::invalid_argument);
  config = quick_config(SolverConfig::Algorithm::kViFp, 10, 1);
  CHECK_THROWS_AS(static_cast<void>(run_pi_fp(game, config)), std::invalid_argument);
}
