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

#include "stocheq/cli.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "test_support.hpp"

using namespace stocheq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TraceRow {
  int outer_iter;
  std::string epsilon;
  std::string max_value_dev;
  std::string millis;
};

std::vector<TraceRow> parse_trace(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "outer_iter,epsilon,max_value_dev,millis");
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    TraceRow row;
    std::istringstream fields(line);
    std::string cell;
    std::getline(fields, cell, ',');
    row.outer_iter = std::stoi(cell);
    std::getline(fields, row.epsilon, ',');
    std::getline(fields, row.max_value_dev, ',');
    std::getline(fields, row.millis, ',');
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("cmd_generate writes parseable, byte-stable specs") {
  TempDir tmp("stocheq_cli_generate");
  GenerateOptions options{7, "small", tmp.file("a.json")};
  cmd_generate(options);
  options.out_path = tmp.file("b.json");
  cmd_generate(options);
  CHECK(slurp(tmp.file("a.json")) == slurp(tmp.file("b.json")));

  const HostilityGameSpec spec = parse_spec(slurp(tmp.file("a.json")));
  CHECK(spec.kinetic_threshold <= 30.0);

  GenerateOptions paper{7, "paper_scale", tmp.file("paper.json")};
  cmd_generate(paper);
  const HostilityGameSpec paper_spec = parse_spec(slurp(tmp.file("paper.json")));
  CHECK(paper_spec.kinetic_threshold == 300.0);
  for (PlayerId p = 0; p < paper_spec.num_players(); ++p) {
    CHECK(paper_spec.moves[static_cast<size_t>(p)].size() >= 7);
    CHECK(paper_spec.moves[static_cast<size_t>(p)].size() <= 10);
  }

  CHECK_THROWS_AS(cmd_generate(GenerateOptions{1, "tiny", tmp.file("x.json")}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cmd_generate(GenerateOptions{1, "small", "/nonexistent-dir/x.json"}),
                  std::runtime_error);
}

TEST_CASE("cmd_solve writes the four artifacts and a well-formed trace") {
  TempDir tmp("stocheq_cli_solve");
  const std::string spec_path = tmp.file("spec.json");
  {
    std::ofstream out(spec_path);
    out << serialize_spec(testing::tiny_hostility_spec());
  }

  SolveOptions options;
  options.spec_path = spec_path;
  options.algorithm = "pi-fp";
  options.fp_iters = 400;
  options.outer_iters = 3;
  options.workers = 1;
  options.out_dir = tmp.file("run");
  std::ostringstream log;
  const ConvergenceReport report = cmd_solve(options, log);

  for (const char* name : {"trace.csv", "strategies.json", "values.json", "manifest.json"}) {
    CHECK(fs::exists(fs::path(options.out_dir) / name));
  }

  const auto rows = parse_trace(slurp(tmp.file("run/trace.csv")));
  REQUIRE(!rows.empty());
  CHECK(rows.size() == static_cast<size_t>(report.iterations_run()));
  CHECK(rows.size() <= 3);
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].outer_iter == static_cast<int>(i) + 1);
    const double epsilon = std::stod(rows[i].epsilon);
    CHECK(std::isfinite(epsilon));
    CHECK(epsilon >= 0.0);
    CHECK(std::stod(rows[i].max_value_dev) >= 0.0);
  }

  // Every artifact re-reads; the manifest records the run faithfully.
  const nlohmann::json manifest = nlohmann::json::parse(slurp(tmp.file("run/manifest.json")));
  CHECK(manifest.at("converged").is_boolean());
  CHECK(manifest.at("converged").get<bool>() == report.converged);
  CHECK(manifest.at("final_epsilon").get<double>() >= 0.0);
  CHECK(manifest.at("iterations_run").get<int>() == report.iterations_run());
  CHECK(manifest.at("algorithm") == "pi-fp");
  CHECK(manifest.at("spec_hash") == spec_hash(parse_spec(slurp(spec_path))));
  const nlohmann::json values_doc = nlohmann::json::parse(slurp(tmp.file("run/values.json")));
  CHECK(values_doc.contains("G_0"));
  CHECK(values_doc.contains("B"));

  const HostilityGameSpec spec = parse_spec(slurp(spec_path));
  const StochasticGame game = build_hostility_game(spec);
  const StrategyProfile parsed =
      strategies_from_json(game, spec, slurp(tmp.file("run/strategies.json")));
  REQUIRE(parsed.size() == report.final_profile.size());
  for (StateId s : game.nonterminal_states()) {
    for (PlayerId p = 0; p < game.num_players(); ++p) {
      const auto& a = parsed[static_cast<size_t>(s)][static_cast<size_t>(p)];
      const auto& b = report.final_profile[static_cast<size_t>(s)][static_cast<size_t>(p)];
      REQUIRE(a.size() == b.size());
      for (size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("cmd_solve is reproducible across worker counts except for timing") {
  TempDir tmp("stocheq_cli_workers");
  const std::string spec_path = tmp.file("spec.json");
  cmd_generate(GenerateOptions{3, "small", spec_path});

  SolveOptions options;
  options.spec_path = spec_path;
  options.fp_iters = 300;
  options.outer_iters = 2;
  options.out_dir = tmp.file("w1");
  std::ostringstream log;
  cmd_solve(options, log);
  options.workers = 4;
  options.out_dir = tmp.file("w4");
  cmd_solve(options, log);

  const auto rows1 = parse_trace(slurp(tmp.file("w1/trace.csv")));
  const auto rows4 = parse_trace(slurp(tmp.file("w4/trace.csv")));
  REQUIRE(rows1.size() == rows4.size());
  for (size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].epsilon == rows4[i].epsilon);
    CHECK(rows1[i].max_value_dev == rows4[i].max_value_dev);
  }
  CHECK(slurp(tmp.file("w1/strategies.json")) == slurp(tmp.file("w4/strategies.json")));
  CHECK(slurp(tmp.file("w1/values.json")) == slurp(tmp.file("w4/values.json")));
}

TEST_CASE("vi-fp and pi-fp traces share the overlay-ready format") {
  TempDir tmp("stocheq_cli_vifp");
  const std::string spec_path = tmp.file("spec.json");
  cmd_generate(GenerateOptions{3, "small", spec_path});

  SolveOptions options;
  options.spec_path = spec_path;
  options.fp_iters = 200;
  options.outer_iters = 2;
  std::ostringstream log;
  options.algorithm = "vi-fp";
  options.out_dir = tmp.file("vi");
  cmd_solve(options, log);
  options.algorithm = "pi-fp";
  options.out_dir = tmp.file("pi");
  cmd_solve(options, log);

  const auto vi_rows = parse_trace(slurp(tmp.file("vi/trace.csv")));
  const auto pi_rows = parse_trace(slurp(tmp.file("pi/trace.csv")));
  CHECK(!vi_rows.empty());
  CHECK(!pi_rows.empty());
}

TEST_CASE("cmd_check reproduces the final trace epsilon") {
  TempDir tmp("stocheq_cli_check");
  const std::string spec_path = tmp.file("spec.json");
  {
    std::ofstream out(spec_path);
    out << serialize_spec(testing::tiny_hostility_spec());
  }
  SolveOptions options;
  options.spec_path = spec_path;
  options.fp_iters = 500;
  options.outer_iters = 3;
  options.out_dir = tmp.file("run");
  std::ostringstream log;
  cmd_solve(options, log);

  const auto rows = parse_trace(slurp(tmp.file("run/trace.csv")));
  const double final_epsilon = std::stod(rows.back().epsilon);

  std::ostringstream check_log;
  const ExPostResult result =
      cmd_check({spec_path, tmp.file("run/strategies.json")}, check_log);
  CHECK(std::fabs(result.epsilon - final_epsilon) <= 1e-9);
  CHECK(check_log.str().find("epsilon =") != std::string::npos);
}

TEST_CASE("cmd_check agrees with the brute-force oracle on uniform strategies") {
  TempDir tmp("stocheq_cli_uniform");
  const HostilityGameSpec spec = testing::tiny_hostility_spec();
  const std::string spec_path = tmp.file("spec.json");
  {
    std::ofstream out(spec_path);
    out << serialize_spec(spec);
  }
  const StochasticGame game = build_hostility_game(spec);
  const StrategyProfile uniform = testing::uniform_profile(game);
  {
    std::ofstream out(tmp.file("uniform.json"));
    out << strategies_to_json(game, spec, uniform);
  }

  std::ostringstream log;
  const ExPostResult checked = cmd_check({spec_path, tmp.file("uniform.json")}, log);
  CHECK(checked.epsilon >= 0.0);
  const double oracle = brute_force_epsilon(game, uniform);
  CHECK(std::fabs(checked.epsilon - oracle) <= 1e-9);
}

TEST_CASE("cmd_check rejects tampered and misshapen strategy files") {
  TempDir tmp("stocheq_cli_tamper");
  const HostilityGameSpec spec = testing::tiny_hostility_spec();
  const std::string spec_path = tmp.file("spec.json");
  {
    std::ofstream out(spec_path);
    out << serialize_spec(spec);
  }
  const StochasticGame game = build_hostility_game(spec);
  const std::string good = strategies_to_json(game, spec, testing::uniform_profile(game));

  SUBCASE("probability not summing to one") {
    std::string bad = good;
    const auto pos = bad.find("0.5");
    bad.replace(pos, 3, "0.7");
    std::ofstream(tmp.file("bad.json")) << bad;
    CHECK_THROWS_WITH_AS(
        static_cast<void>(cmd_check({spec_path, tmp.file("bad.json")}, std::cout)),
        doctest::Contains("sum"), std::runtime_error);
  }
  SUBCASE("missing state") {
    std::string bad = good;
    const auto pos = bad.find("\"G_3\"");
    bad.erase(pos, bad.find("\"G_4\"") - pos);
    std::ofstream(tmp.file("bad.json")) << bad;
    CHECK_THROWS_WITH_AS(
        static_cast<void>(cmd_check({spec_path, tmp.file("bad.json")}, std::cout)),
        doctest::Contains("G_3"), std::runtime_error);
  }
  SUBCASE("unknown state") {
    std::string bad = good;
    const auto pos = bad.find("\"G_3\"");
    bad.replace(pos, 5, "\"G_99\"");
    std::ofstream(tmp.file("bad.json")) << bad;
    CHECK_THROWS_AS(
        static_cast<void>(cmd_check({spec_path, tmp.file("bad.json")}, std::cout)),
        std::runtime_error);
  }
}

TEST_CASE("disabling the epsilon trace leaves intermediate cells empty") {
  TempDir tmp("stocheq_cli_notrace");
  const std::string spec_path = tmp.file("spec.json");
  cmd_generate(GenerateOptions{5, "small", spec_path});

  SolveOptions options;
  options.spec_path = spec_path;
  options.fp_iters = 150;
  options.outer_iters = 3;
  options.no_epsilon_trace = true;
  options.out_dir = tmp.file("run");
  std::ostringstream log;
  cmd_solve(options, log);

  const auto rows = parse_trace(slurp(tmp.file("run/trace.csv")));
  REQUIRE(!rows.empty());
  for (size_t i = 0; i + 1 < rows.size(); ++i) CHECK(rows[i].epsilon.empty());
  CHECK(!rows.back().epsilon.empty());
  CHECK(std::stod(rows.back().epsilon) >= 0.0);
}
