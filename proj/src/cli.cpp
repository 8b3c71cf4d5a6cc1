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

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace stocheq {

namespace {

using Json = nlohmann::ordered_json;

std::string format_g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

StoppingCondition stage_stop_from(const SolveOptions& options) {
  if (options.fp_iters < 1) {
    throw std::invalid_argument("--fp-iters must be >= 1");
  }
  return options.fp_min_regret ? StoppingCondition::fixed_min_regret(options.fp_iters)
                               : StoppingCondition::fixed(options.fp_iters);
}

SolverConfig config_from(const SolveOptions& options) {
  SolverConfig config;
  if (options.algorithm == "vi-fp") {
    config.algorithm = SolverConfig::Algorithm::kViFp;
  } else if (options.algorithm == "pi-fp") {
    config.algorithm = SolverConfig::Algorithm::kPiFp;
  } else {
    throw std::invalid_argument("unknown algorithm '" + options.algorithm +
                                "' (expected vi-fp or pi-fp)");
  }
  config.stage_stop = stage_stop_from(options);
  config.max_outer_iterations = options.outer_iters;
  config.value_delta = options.delta;
  config.workers = options.workers;
  config.seed = options.seed;
  config.epsilon_trace = !options.no_epsilon_trace;
  return config;
}

}  // namespace

std::string trace_to_csv(const ConvergenceReport& report) {
  std::string csv = "outer_iter,epsilon,max_value_dev,millis\n";
  for (size_t i = 0; i < report.iterations.size(); ++i) {
    const IterationRecord& record = report.iterations[i];
    csv += std::to_string(i + 1);
    csv += ',';
    if (record.epsilon) csv += format_g9(*record.epsilon);
    csv += ',';
    csv += format_g9(record.max_value_dev);
    csv += ',';
    csv += std::to_string(record.millis);
    csv += '\n';
  }
  return csv;
}

std::string strategies_to_json(const StochasticGame& game, const HostilityGameSpec& spec,
                               const StrategyProfile& profile) {
  Json doc = Json::object();
  for (StateId s = 0; s < game.num_states(); ++s) {
    if (game.is_terminal(s)) continue;
    Json per_player = Json::object();
    for (PlayerId p = 0; p < game.num_players(); ++p) {
      Json weights = Json::object();
      const MixedStrategy& mix = profile[static_cast<size_t>(s)][static_cast<size_t>(p)];
      for (size_t a = 0; a < mix.size(); ++a) {
        weights[spec.moves[static_cast<size_t>(p)][a]] = mix[a];
      }
      per_player[game.player_names[static_cast<size_t>(p)]] = std::move(weights);
    }
    doc[game.state_names[static_cast<size_t>(s)]] = std::move(per_player);
  }
  return doc.dump(2) + "\n";
}

StrategyProfile strategies_from_json(const StochasticGame& game,
                                     const HostilityGameSpec& spec,
                                     const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("strategies file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("strategies file: expected an object");

  StrategyProfile profile(static_cast<size_t>(game.num_states()));
  std::vector<char> seen(static_cast<size_t>(game.num_states()), 0);

  for (const auto& [state_name, per_player] : doc.items()) {
    StateId s = -1;
    for (StateId i = 0; i < game.num_states(); ++i) {
      if (game.state_names[static_cast<size_t>(i)] == state_name) s = i;
    }
    if (s < 0) throw std::runtime_error("strategies file: unknown state " + state_name);
    if (game.is_terminal(s)) {
      throw std::runtime_error("strategies file: state " + state_name + " is terminal");
    }
    seen[static_cast<size_t>(s)] = 1;
    profile[static_cast<size_t>(s)].resize(static_cast<size_t>(game.num_players()));

    for (PlayerId p = 0; p < game.num_players(); ++p) {
      const std::string& player_name = game.player_names[static_cast<size_t>(p)];
      if (!per_player.contains(player_name)) {
        throw std::runtime_error("strategies file: state " + state_name +
                                 " is missing player " + player_name);
      }
      const Json& weights = per_player.at(player_name);
      const auto& moves = spec.moves[static_cast<size_t>(p)];
      MixedStrategy mix(moves.size(), 0.0);
      double sum = 0.0;
      for (size_t a = 0; a < moves.size(); ++a) {
        if (!weights.contains(moves[a])) {
          throw std::runtime_error("strategies file: state " + state_name + ", player " +
                                   player_name + " is missing move " + moves[a]);
        }
        const Json& w = weights.at(moves[a]);
        if (!w.is_number()) {
          throw std::runtime_error("strategies file: state " + state_name + ", player " +
                                   player_name + ", move " + moves[a] +
                                   ": expected a number");
        }
        mix[a] = w.get<double>();
        if (mix[a] < 0.0) {
          throw std::runtime_error("strategies file: state " + state_name + ", player " +
                                   player_name + ", move " + moves[a] +
                                   ": negative probability");
        }
        sum += mix[a];
      }
      if (std::fabs(sum - 1.0) > kProbNormalizeTol) {
        throw std::runtime_error("strategies file: state " + state_name + ", player " +
                                 player_name + ": probabilities sum to " + format_g9(sum) +
                                 ", expected 1");
      }
      for (double& w : mix) w /= sum;
      profile[static_cast<size_t>(s)][static_cast<size_t>(p)] = std::move(mix);
    }
  }

  for (StateId s = 0; s < game.num_states(); ++s) {
    if (!game.is_terminal(s) && !seen[static_cast<size_t>(s)]) {
      throw std::runtime_error("strategies file: missing state " +
                               game.state_names[static_cast<size_t>(s)]);
    }
  }
  return profile;
}

std::string values_to_json(const StochasticGame& game, const ValueTable& values) {
  Json doc = Json::object();
  for (StateId s = 0; s < game.num_states(); ++s) {
    Json per_player = Json::object();
    for (PlayerId p = 0; p < game.num_players(); ++p) {
      per_player[game.player_names[static_cast<size_t>(p)]] = values.at(s, p);
    }
    doc[game.state_names[static_cast<size_t>(s)]] = std::move(per_player);
  }
  return doc.dump(2) + "\n";
}

void cmd_generate(const GenerateOptions& options) {
  SizeProfile profile;
  if (options.profile == "small") {
    profile = SizeProfile::kSmall;
  } else if (options.profile == "paper_scale") {
    profile = SizeProfile::kPaperScale;
  } else {
    throw std::invalid_argument("unknown profile '" + options.profile +
                                "' (expected small or paper_scale)");
  }
  const HostilityGameSpec spec = generate_default_spec(options.seed, profile);
  write_file(options.out_path, serialize_spec(spec));
}

ConvergenceReport cmd_solve(const SolveOptions& options, std::ostream& log) {
  const SolverConfig config = config_from(options);
  const HostilityGameSpec spec = parse_spec(read_file(options.spec_path));
  const StochasticGame game = build_hostility_game(spec);
  const std::string started_at = utc_timestamp();

  log << "solving " << options.spec_path << " (" << game.num_states() << " states, "
      << game.num_players() << " players) with " << options.algorithm << ", fp_iters="
      << options.fp_iters << ", workers=" << options.workers << "\n";

  const ConvergenceReport report = run_solver(game, config);

  std::filesystem::create_directories(options.out_dir);
  const auto out = [&](const char* name) {
    return (std::filesystem::path(options.out_dir) / name).string();
  };
  write_file(out("trace.csv"), trace_to_csv(report));
  write_file(out("strategies.json"), strategies_to_json(game, spec, report.final_profile));
  write_file(out("values.json"), values_to_json(game, report.final_values));

  Json manifest;
  manifest["tool"] = kToolVersion;
  manifest["created_utc"] = started_at;
  manifest["spec_path"] = options.spec_path;
  manifest["spec_hash"] = spec_hash(spec);
  manifest["algorithm"] = options.algorithm;
  manifest["fp_iters"] = options.fp_iters;
  manifest["fp_min_regret"] = options.fp_min_regret;
  manifest["outer_iters"] = options.outer_iters;
  manifest["delta"] = options.delta;
  manifest["workers"] = options.workers;
  manifest["seed"] = options.seed;
  manifest["epsilon_trace"] = !options.no_epsilon_trace;
  manifest["converged"] = report.converged;
  manifest["iterations_run"] = report.iterations_run();
  manifest["final_epsilon"] = report.final_epsilon;
  write_file(out("manifest.json"), manifest.dump(2) + "\n");

  log << (report.converged ? "converged" : "halted without convergence") << " after "
      << report.iterations_run() << " outer iteration(s), final epsilon "
      << format_g9(report.final_epsilon) << "\n";
  return report;
}

ExPostResult cmd_check(const CheckOptions& options, std::ostream& log) {
  const HostilityGameSpec spec = parse_spec(read_file(options.spec_path));
  const StochasticGame game = build_hostility_game(spec);
  const StrategyProfile profile =
      strategies_from_json(game, spec, read_file(options.strategies_path));

  const ExPostResult result = ex_post_epsilon(game, profile);
  for (PlayerId p = 0; p < game.num_players(); ++p) {
    log << "player " << game.player_names[static_cast<size_t>(p)] << ": gain "
        << format_g9(result.gains[static_cast<size_t>(p)]) << "\n";
  }
  log << "epsilon = " << format_g9(result.epsilon) << "\n";
  return result;
}

}  // namespace stocheq
