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

#include "stocheq/hostility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "stocheq/rng.hpp"

namespace stocheq {

namespace {

using Json = nlohmann::ordered_json;

// Hostility sums are deduplicated on a 1e-9 grid so that real-valued levels
// reached along different move sequences collapse to one state.
constexpr double kSumGrid = 1e-9;

std::int64_t sum_key(double sum) {
  return static_cast<std::int64_t>(std::llround(sum / kSumGrid));
}

std::string format_level(double x) {
  if (std::fabs(x - std::round(x)) < 1e-9) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(std::llround(x)));
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const Json& require_field(const Json& obj, const std::string& key,
                          const std::string& path) {
  if (!obj.is_object()) {
    throw SpecParseError((path.empty() ? std::string("document") : path) +
                         ": expected an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SpecParseError("missing field " + join_path(path, key));
  }
  return it.value();
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) {
    throw SpecParseError(path + ": expected a number");
  }
  return j.get<double>();
}

double as_probability(const Json& j, const std::string& path) {
  const double v = as_number(j, path);
  if (!(v >= 0.0 && v <= 1.0)) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    throw SpecParseError(path + ": probability " + buf + " outside [0,1]");
  }
  return v;
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) {
    throw SpecParseError(path + ": expected a string");
  }
  return j.get<std::string>();
}

// probabilities.<table>.<red player>.<move>, one entry required per move.
std::vector<std::vector<double>> parse_prob_table(
    const Json& table, const HostilityGameSpec& spec, const std::string& path,
    bool keyed_by_blue_moves) {
  std::vector<std::vector<double>> out(static_cast<size_t>(spec.num_players()));
  for (PlayerId j = 1; j < spec.num_players(); ++j) {
    const std::string& red_name = spec.players[static_cast<size_t>(j)].name;
    const Json& row = require_field(table, red_name, path);
    const std::string row_path = join_path(path, red_name);
    const auto& moves =
        keyed_by_blue_moves ? spec.moves[0] : spec.moves[static_cast<size_t>(j)];
    auto& probs = out[static_cast<size_t>(j)];
    probs.reserve(moves.size());
    for (const std::string& move : moves) {
      probs.push_back(
          as_probability(require_field(row, move, row_path), join_path(row_path, move)));
    }
    if (row.size() != moves.size()) {
      for (const auto& [key, unused] : row.items()) {
        if (std::find(moves.begin(), moves.end(), key) == moves.end()) {
          throw SpecParseError(join_path(row_path, key) + ": unknown move");
        }
      }
    }
  }
  return out;
}

std::vector<double> parse_payoff_vector(const Json& payoffs, const std::string& key,
                                        int num_players) {
  const Json& arr = require_field(payoffs, key, "payoffs");
  const std::string path = join_path("payoffs", key);
  if (!arr.is_array() || static_cast<int>(arr.size()) != num_players) {
    throw SpecParseError(path + ": expected an array with one entry per player");
  }
  std::vector<double> out;
  out.reserve(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) {
    out.push_back(as_number(arr[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void check_spec_shape(const HostilityGameSpec& spec) {
  const int n = spec.num_players();
  if (n < 2) throw std::invalid_argument("hostility spec needs a blue and at least one red player");
  if (!spec.players[0].blue) throw std::invalid_argument("player 0 must be the blue player");
  for (PlayerId p = 1; p < n; ++p) {
    if (spec.players[static_cast<size_t>(p)].blue) {
      throw std::invalid_argument("only player 0 may be blue");
    }
  }
  if (static_cast<int>(spec.moves.size()) != n ||
      static_cast<int>(spec.hostility.size()) != n) {
    throw std::invalid_argument("moves/hostility tables must cover every player");
  }
  for (PlayerId p = 0; p < n; ++p) {
    const size_t m = spec.moves[static_cast<size_t>(p)].size();
    if (m < 1 || m > 64) {
      throw std::invalid_argument("player " + spec.players[static_cast<size_t>(p)].name +
                                  " must have between 1 and 64 moves");
    }
    if (spec.hostility[static_cast<size_t>(p)].size() != m) {
      throw std::invalid_argument("hostility table size mismatch for player " +
                                  spec.players[static_cast<size_t>(p)].name);
    }
  }
  auto check_red_table = [&](const std::vector<std::vector<double>>& t, bool by_blue,
                             const char* name) {
    if (static_cast<int>(t.size()) != n) {
      throw std::invalid_argument(std::string(name) + " table must cover every red player");
    }
    for (PlayerId j = 1; j < n; ++j) {
      const size_t want = by_blue ? spec.moves[0].size() : spec.moves[static_cast<size_t>(j)].size();
      if (t[static_cast<size_t>(j)].size() != want) {
        throw std::invalid_argument(std::string(name) + " table size mismatch for player " +
                                    spec.players[static_cast<size_t>(j)].name);
      }
      for (double v : t[static_cast<size_t>(j)]) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw std::invalid_argument(std::string(name) + ": probability outside [0,1]");
        }
      }
    }
  };
  check_red_table(spec.b_def, true, "b_def");
  check_red_table(spec.b_undef, true, "b_undef");
  check_red_table(spec.r_def, false, "r_def");
  check_red_table(spec.r_undef, false, "r_undef");

  if (static_cast<int>(spec.counters.size()) != n) {
    throw std::invalid_argument("counters table must cover every red player");
  }
  for (PlayerId j = 1; j < n; ++j) {
    const auto& per_move = spec.counters[static_cast<size_t>(j)];
    if (per_move.size() != spec.moves[static_cast<size_t>(j)].size()) {
      throw std::invalid_argument("counters table size mismatch for player " +
                                  spec.players[static_cast<size_t>(j)].name);
    }
    for (const auto& set : per_move) {
      for (int b : set) {
        if (b < 0 || b >= static_cast<int>(spec.moves[0].size())) {
          throw std::invalid_argument("counter entry references a nonexistent blue move");
        }
      }
    }
  }
  if (static_cast<int>(spec.blue_win_payoff.size()) != n ||
      static_cast<int>(spec.red_win_payoff.size()) != n ||
      static_cast<int>(spec.kinetic_payoff.size()) != n) {
    throw std::invalid_argument("payoff vectors must have one entry per player");
  }
  if (!(spec.kinetic_threshold > 0.0)) {
    throw std::invalid_argument("kinetic threshold K must be positive");
  }
}

}  // namespace

int HostilityGameSpec::move_index(PlayerId p, const std::string& move) const {
  const auto& list = moves[static_cast<size_t>(p)];
  for (size_t i = 0; i < list.size(); ++i) {
    if (list[i] == move) return static_cast<int>(i);
  }
  return -1;
}

OutcomeTriple resolve_outcome(const HostilityGameSpec& spec,
                              std::span<const int> joint_move) {
  const int n = spec.num_players();
  if (static_cast<int>(joint_move.size()) != n) {
    throw std::invalid_argument("resolve_outcome: joint move must name one move per player");
  }
  for (PlayerId p = 0; p < n; ++p) {
    if (joint_move[static_cast<size_t>(p)] < 0 ||
        joint_move[static_cast<size_t>(p)] >=
            static_cast<int>(spec.moves[static_cast<size_t>(p)].size())) {
      throw std::invalid_argument("resolve_outcome: unknown move for player " +
                                  spec.players[static_cast<size_t>(p)].name);
    }
  }

  const int blue_move = joint_move[0];
  double blue_success_sum = 0.0;
  double all_red_fail = 1.0;
  for (PlayerId j = 1; j < n; ++j) {
    const int red_move = joint_move[static_cast<size_t>(j)];
    const auto& counter_set =
        spec.counters[static_cast<size_t>(j)][static_cast<size_t>(red_move)];
    const bool defended =
        std::binary_search(counter_set.begin(), counter_set.end(), blue_move);
    blue_success_sum +=
        defended ? spec.b_def[static_cast<size_t>(j)][static_cast<size_t>(blue_move)]
                 : spec.b_undef[static_cast<size_t>(j)][static_cast<size_t>(blue_move)];
    const double r =
        defended ? spec.r_def[static_cast<size_t>(j)][static_cast<size_t>(red_move)]
                 : spec.r_undef[static_cast<size_t>(j)][static_cast<size_t>(red_move)];
    all_red_fail *= 1.0 - r;
  }
  const double q_blue = blue_success_sum / (n - 1);
  const double q_red = 1.0 - all_red_fail;

  OutcomeTriple out;
  out.blue_win = q_blue * (1.0 - q_red);
  out.red_win = q_red * (1.0 - q_blue);
  out.repeat = std::max(0.0, 1.0 - out.blue_win - out.red_win);
  return out;
}

StochasticGame build_hostility_game(const HostilityGameSpec& spec) {
  check_spec_shape(spec);
  const int n = spec.num_players();
  const double threshold = spec.kinetic_threshold;

  bool integral_levels = true;
  for (PlayerId p = 0; p < n; ++p) {
    for (size_t m = 0; m < spec.moves[static_cast<size_t>(p)].size(); ++m) {
      const double h = spec.hostility[static_cast<size_t>(p)][m];
      if (!(h > 0.0)) {
        throw std::invalid_argument(
            "nonpositive hostility level for move " + spec.moves[static_cast<size_t>(p)][m] +
            " of player " + spec.players[static_cast<size_t>(p)].name +
            " (finite play requires strictly positive levels)");
      }
      if (std::fabs(h - std::round(h)) > 1e-9) integral_levels = false;
    }
  }

  // Outcomes and hostility sums do not depend on the state, only on the joint
  // move, so resolve each profile once up front.
  std::vector<int> counts(static_cast<size_t>(n));
  for (PlayerId p = 0; p < n; ++p) {
    counts[static_cast<size_t>(p)] =
        static_cast<int>(spec.moves[static_cast<size_t>(p)].size());
  }
  long profiles = 1;
  for (int c : counts) profiles *= c;

  std::vector<OutcomeTriple> outcome_of(static_cast<size_t>(profiles));
  std::vector<double> hostility_of(static_cast<size_t>(profiles));
  {
    std::vector<int> actions(static_cast<size_t>(n), 0);
    long prof = 0;
    do {
      outcome_of[static_cast<size_t>(prof)] = resolve_outcome(spec, actions);
      double h = 0.0;
      for (PlayerId p = 0; p < n; ++p) {
        h += spec.hostility[static_cast<size_t>(p)][static_cast<size_t>(actions[static_cast<size_t>(p)])];
      }
      hostility_of[static_cast<size_t>(prof)] = h;
      ++prof;
    } while (next_profile(counts, actions));
  }

  // Materialize hostility-sum states. Integer levels get the full lattice
  // 0..ceil(K)-1; real levels get only the sums reachable from 0.
  std::map<std::int64_t, double> sums;  // grid key -> representative sum
  if (integral_levels) {
    const long long top = static_cast<long long>(std::ceil(threshold - kSumGrid));
    for (long long k = 0; k < top; ++k) {
      sums.emplace(sum_key(static_cast<double>(k)), static_cast<double>(k));
    }
  } else {
    std::vector<double> frontier{0.0};
    sums.emplace(sum_key(0.0), 0.0);
    while (!frontier.empty()) {
      std::vector<double> next_frontier;
      for (double base : frontier) {
        for (long prof = 0; prof < profiles; ++prof) {
          const double next = base + hostility_of[static_cast<size_t>(prof)];
          if (next >= threshold - kSumGrid) continue;  // clamps to kinetic
          if (sums.emplace(sum_key(next), next).second) {
            next_frontier.push_back(next);
          }
        }
      }
      frontier = std::move(next_frontier);
    }
  }

  const int num_nonterminal = static_cast<int>(sums.size());
  const StateId kinetic_id = num_nonterminal;
  const StateId blue_win_id = num_nonterminal + 1;
  const StateId red_win_id = num_nonterminal + 2;
  const int num_states = num_nonterminal + 3;

  std::map<std::int64_t, StateId> state_of_sum;
  std::vector<double> sum_of_state(static_cast<size_t>(num_nonterminal));
  {
    StateId id = 0;
    for (const auto& [key, sum] : sums) {
      state_of_sum.emplace(key, id);
      sum_of_state[static_cast<size_t>(id)] = sum;
      ++id;
    }
  }

  StochasticGame game;
  for (PlayerId p = 0; p < n; ++p) {
    game.player_names.push_back(spec.players[static_cast<size_t>(p)].name);
  }
  game.state_names.resize(static_cast<size_t>(num_states));
  game.terminal.assign(static_cast<size_t>(num_states), 0);
  game.action_counts.resize(static_cast<size_t>(num_states));
  game.transition_offsets.resize(static_cast<size_t>(num_states));
  game.transition_entries.resize(static_cast<size_t>(num_states));
  game.rewards.resize(static_cast<size_t>(num_states));
  game.terminal_payoffs.resize(static_cast<size_t>(num_states));
  game.initial_state = state_of_sum.at(sum_key(0.0));

  for (StateId s = 0; s < num_nonterminal; ++s) {
    game.state_names[static_cast<size_t>(s)] =
        "G_" + format_level(sum_of_state[static_cast<size_t>(s)]);
  }
  game.state_names[static_cast<size_t>(kinetic_id)] = "G_" + format_level(threshold);
  game.state_names[static_cast<size_t>(blue_win_id)] = "B";
  game.state_names[static_cast<size_t>(red_win_id)] = "R";
  for (StateId s : {kinetic_id, blue_win_id, red_win_id}) {
    game.terminal[static_cast<size_t>(s)] = 1;
  }
  game.terminal_payoffs[static_cast<size_t>(kinetic_id)] = spec.kinetic_payoff;
  game.terminal_payoffs[static_cast<size_t>(blue_win_id)] = spec.blue_win_payoff;
  game.terminal_payoffs[static_cast<size_t>(red_win_id)] = spec.red_win_payoff;

  for (StateId s = 0; s < num_nonterminal; ++s) {
    const double base = sum_of_state[static_cast<size_t>(s)];
    game.action_counts[static_cast<size_t>(s)] = counts;
    auto& offsets = game.transition_offsets[static_cast<size_t>(s)];
    auto& entries = game.transition_entries[static_cast<size_t>(s)];
    offsets.reserve(static_cast<size_t>(profiles) + 1);
    entries.reserve(static_cast<size_t>(profiles) * 3);
    offsets.push_back(0);
    for (long prof = 0; prof < profiles; ++prof) {
      const OutcomeTriple& o = outcome_of[static_cast<size_t>(prof)];
      if (o.blue_win > 0.0) entries.push_back({blue_win_id, o.blue_win});
      if (o.red_win > 0.0) entries.push_back({red_win_id, o.red_win});
      if (o.repeat > 0.0) {
        const double next = base + hostility_of[static_cast<size_t>(prof)];
        const StateId succ = (next >= threshold - kSumGrid)
                                 ? kinetic_id
                                 : state_of_sum.at(sum_key(next));
        entries.push_back({succ, o.repeat});
      }
      offsets.push_back(entries.size());
    }
  }
  return game;
}

HostilityGameSpec generate_default_spec(std::uint64_t seed, SizeProfile profile) {
  SplitMix64 rng(seed);
  const bool paper = profile == SizeProfile::kPaperScale;

  HostilityGameSpec spec;
  spec.players = {{"Blue", true}, {"Warship", false}, {"Security", false}, {"Auxiliary", false}};
  const int n = spec.num_players();
  const char* prefixes[] = {"B", "W", "S", "A"};

  spec.moves.resize(static_cast<size_t>(n));
  spec.hostility.resize(static_cast<size_t>(n));
  for (PlayerId p = 0; p < n; ++p) {
    const int num_moves = static_cast<int>(paper ? rng.next_int(7, 10) : rng.next_int(2, 4));
    for (int m = 0; m < num_moves; ++m) {
      spec.moves[static_cast<size_t>(p)].push_back(prefixes[p] + std::to_string(m + 1));
      spec.hostility[static_cast<size_t>(p)].push_back(
          static_cast<double>(paper ? rng.next_int(1, 40) : rng.next_int(1, 6)));
    }
  }

  spec.counters.resize(static_cast<size_t>(n));
  for (PlayerId j = 1; j < n; ++j) {
    spec.counters[static_cast<size_t>(j)].resize(spec.moves[static_cast<size_t>(j)].size());
    for (auto& set : spec.counters[static_cast<size_t>(j)]) {
      for (int b = 0; b < static_cast<int>(spec.moves[0].size()); ++b) {
        if (rng.next_bool(0.35)) set.push_back(b);
      }
    }
  }

  auto draw_pair = [&rng](double& defended, double& undefended) {
    const double a = rng.next_real(0.05, 0.95);
    const double b = rng.next_real(0.05, 0.95);
    defended = std::min(a, b);
    undefended = std::max(a, b);
    if (defended == undefended) defended = std::max(0.05, undefended - 0.01);
  };

  spec.b_def.resize(static_cast<size_t>(n));
  spec.b_undef.resize(static_cast<size_t>(n));
  spec.r_def.resize(static_cast<size_t>(n));
  spec.r_undef.resize(static_cast<size_t>(n));
  for (PlayerId j = 1; j < n; ++j) {
    spec.b_def[static_cast<size_t>(j)].resize(spec.moves[0].size());
    spec.b_undef[static_cast<size_t>(j)].resize(spec.moves[0].size());
    for (size_t b = 0; b < spec.moves[0].size(); ++b) {
      draw_pair(spec.b_def[static_cast<size_t>(j)][b], spec.b_undef[static_cast<size_t>(j)][b]);
    }
    spec.r_def[static_cast<size_t>(j)].resize(spec.moves[static_cast<size_t>(j)].size());
    spec.r_undef[static_cast<size_t>(j)].resize(spec.moves[static_cast<size_t>(j)].size());
    for (size_t m = 0; m < spec.moves[static_cast<size_t>(j)].size(); ++m) {
      draw_pair(spec.r_def[static_cast<size_t>(j)][m], spec.r_undef[static_cast<size_t>(j)][m]);
    }
  }

  spec.blue_win_payoff.assign(static_cast<size_t>(n), -100.0);
  spec.blue_win_payoff[0] = 100.0;
  spec.red_win_payoff.assign(static_cast<size_t>(n), 100.0);
  spec.red_win_payoff[0] = -100.0;
  spec.kinetic_payoff.assign(static_cast<size_t>(n), -200.0);
  spec.kinetic_threshold = paper ? 300.0 : static_cast<double>(rng.next_int(12, 30));
  return spec;
}

std::string serialize_spec(const HostilityGameSpec& spec) {
  check_spec_shape(spec);
  const int n = spec.num_players();
  Json doc;

  Json players = Json::array();
  for (const auto& p : spec.players) {
    players.push_back(Json{{"name", p.name}, {"role", p.blue ? "blue" : "red"}});
  }
  doc["players"] = std::move(players);

  Json moves = Json::object();
  for (PlayerId p = 0; p < n; ++p) {
    moves[spec.players[static_cast<size_t>(p)].name] = spec.moves[static_cast<size_t>(p)];
  }
  doc["moves"] = std::move(moves);

  Json counters = Json::object();
  for (PlayerId j = 1; j < n; ++j) {
    Json per_move = Json::object();
    for (size_t m = 0; m < spec.moves[static_cast<size_t>(j)].size(); ++m) {
      Json blue_moves = Json::array();
      for (int b : spec.counters[static_cast<size_t>(j)][m]) {
        blue_moves.push_back(spec.moves[0][static_cast<size_t>(b)]);
      }
      per_move[spec.moves[static_cast<size_t>(j)][m]] = std::move(blue_moves);
    }
    counters[spec.players[static_cast<size_t>(j)].name] = std::move(per_move);
  }
  doc["counters"] = std::move(counters);

  auto red_table = [&](const std::vector<std::vector<double>>& t, bool by_blue) {
    Json table = Json::object();
    for (PlayerId j = 1; j < n; ++j) {
      Json row = Json::object();
      const auto& keys = by_blue ? spec.moves[0] : spec.moves[static_cast<size_t>(j)];
      for (size_t m = 0; m < keys.size(); ++m) {
        row[keys[m]] = t[static_cast<size_t>(j)][m];
      }
      table[spec.players[static_cast<size_t>(j)].name] = std::move(row);
    }
    return table;
  };
  doc["probabilities"] = Json{{"b_def", red_table(spec.b_def, true)},
                              {"b_undef", red_table(spec.b_undef, true)},
                              {"r_def", red_table(spec.r_def, false)},
                              {"r_undef", red_table(spec.r_undef, false)}};

  doc["payoffs"] = Json{{"blue_win", spec.blue_win_payoff},
                        {"red_win", spec.red_win_payoff},
                        {"kinetic", spec.kinetic_payoff}};

  Json hostility = Json::object();
  for (PlayerId p = 0; p < n; ++p) {
    Json row = Json::object();
    for (size_t m = 0; m < spec.moves[static_cast<size_t>(p)].size(); ++m) {
      row[spec.moves[static_cast<size_t>(p)][m]] = spec.hostility[static_cast<size_t>(p)][m];
    }
    hostility[spec.players[static_cast<size_t>(p)].name] = std::move(row);
  }
  doc["hostility"] = std::move(hostility);
  doc["K"] = spec.kinetic_threshold;

  return doc.dump(2) + "\n";
}

HostilityGameSpec parse_spec(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecParseError(std::string("invalid JSON: ") + e.what());
  }

  HostilityGameSpec spec;

  const Json& players = require_field(doc, "players", "");
  if (!players.is_array() || players.size() < 2) {
    throw SpecParseError("players: expected an array with a blue and at least one red player");
  }
  std::set<std::string> seen_names;
  for (size_t i = 0; i < players.size(); ++i) {
    const std::string path = "players[" + std::to_string(i) + "]";
    const std::string name = as_string(require_field(players[i], "name", path),
                                       join_path(path, "name"));
    const std::string role = as_string(require_field(players[i], "role", path),
                                       join_path(path, "role"));
    if (role != "blue" && role != "red") {
      throw SpecParseError(join_path(path, "role") + ": expected \"blue\" or \"red\"");
    }
    if (!seen_names.insert(name).second) {
      throw SpecParseError(join_path(path, "name") + ": duplicate player name " + name);
    }
    if ((i == 0) != (role == "blue")) {
      throw SpecParseError(join_path(path, "role") +
                           ": player 0 must be blue and all others red");
    }
    spec.players.push_back({name, role == "blue"});
  }
  const int n = spec.num_players();

  const Json& moves = require_field(doc, "moves", "");
  spec.moves.resize(static_cast<size_t>(n));
  for (PlayerId p = 0; p < n; ++p) {
    const std::string& name = spec.players[static_cast<size_t>(p)].name;
    const Json& list = require_field(moves, name, "moves");
    const std::string path = join_path("moves", name);
    if (!list.is_array() || list.empty() || list.size() > 64) {
      throw SpecParseError(path + ": expected between 1 and 64 move names");
    }
    std::set<std::string> seen;
    for (size_t m = 0; m < list.size(); ++m) {
      const std::string move = as_string(list[m], path + "[" + std::to_string(m) + "]");
      if (!seen.insert(move).second) {
        throw SpecParseError(path + ": duplicate move name " + move);
      }
      spec.moves[static_cast<size_t>(p)].push_back(move);
    }
  }

  const Json& counters = require_field(doc, "counters", "");
  if (!counters.is_object()) throw SpecParseError("counters: expected an object");
  spec.counters.resize(static_cast<size_t>(n));
  for (PlayerId j = 1; j < n; ++j) {
    spec.counters[static_cast<size_t>(j)].resize(spec.moves[static_cast<size_t>(j)].size());
  }
  for (const auto& [red_name, per_move] : counters.items()) {
    PlayerId j = -1;
    for (PlayerId p = 1; p < n; ++p) {
      if (spec.players[static_cast<size_t>(p)].name == red_name) j = p;
    }
    if (j < 0) {
      throw SpecParseError(join_path("counters", red_name) + ": unknown red player");
    }
    const std::string path = join_path("counters", red_name);
    if (!per_move.is_object()) throw SpecParseError(path + ": expected an object");
    for (const auto& [move_name, blue_list] : per_move.items()) {
      const int m = spec.move_index(j, move_name);
      if (m < 0) {
        throw SpecParseError(join_path(path, move_name) + ": unknown move");
      }
      const std::string move_path = join_path(path, move_name);
      if (!blue_list.is_array()) {
        throw SpecParseError(move_path + ": expected an array of blue moves");
      }
      auto& set = spec.counters[static_cast<size_t>(j)][static_cast<size_t>(m)];
      for (const Json& entry : blue_list) {
        const std::string blue_move = as_string(entry, move_path);
        const int b = spec.move_index(0, blue_move);
        if (b < 0) {
          throw SpecParseError(move_path + ": unknown blue move " + blue_move);
        }
        set.push_back(b);
      }
      std::sort(set.begin(), set.end());
      set.erase(std::unique(set.begin(), set.end()), set.end());
    }
  }

  const Json& probabilities = require_field(doc, "probabilities", "");
  spec.b_def = parse_prob_table(require_field(probabilities, "b_def", "probabilities"),
                                spec, "probabilities.b_def", true);
  spec.b_undef = parse_prob_table(require_field(probabilities, "b_undef", "probabilities"),
                                  spec, "probabilities.b_undef", true);
  spec.r_def = parse_prob_table(require_field(probabilities, "r_def", "probabilities"),
                                spec, "probabilities.r_def", false);
  spec.r_undef = parse_prob_table(require_field(probabilities, "r_undef", "probabilities"),
                                  spec, "probabilities.r_undef", false);

  const Json& payoffs = require_field(doc, "payoffs", "");
  spec.blue_win_payoff = parse_payoff_vector(payoffs, "blue_win", n);
  spec.red_win_payoff = parse_payoff_vector(payoffs, "red_win", n);
  spec.kinetic_payoff = parse_payoff_vector(payoffs, "kinetic", n);

  const Json& hostility = require_field(doc, "hostility", "");
  spec.hostility.resize(static_cast<size_t>(n));
  for (PlayerId p = 0; p < n; ++p) {
    const std::string& name = spec.players[static_cast<size_t>(p)].name;
    const Json& row = require_field(hostility, name, "hostility");
    const std::string path = join_path("hostility", name);
    for (const std::string& move : spec.moves[static_cast<size_t>(p)]) {
      spec.hostility[static_cast<size_t>(p)].push_back(
          as_number(require_field(row, move, path), join_path(path, move)));
    }
  }

  spec.kinetic_threshold = as_number(require_field(doc, "K", ""), "K");
  if (!(spec.kinetic_threshold > 0.0)) {
    throw SpecParseError("K: must be positive");
  }
  return spec;
}

std::string spec_hash(const HostilityGameSpec& spec) {
  const std::string bytes = serialize_spec(spec);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace stocheq
