// Copyright 2026 The ceqlab Authors.
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

#ifndef CEQLAB_CLI_HPP_
#define CEQLAB_CLI_HPP_

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ceqlab/equilibrium.hpp"
#include "ceqlab/errors.hpp"
#include "ceqlab/estimation.hpp"
#include "ceqlab/game.hpp"
#include "ceqlab/game_io.hpp"
#include "ceqlab/orchestrator.hpp"
#include "ceqlab/policy_net.hpp"
#include "ceqlab/training.hpp"
#include "json.hpp"

namespace ceqlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitPartial = 4;

inline constexpr const char* kOutputDirEnv = "CEQLAB_OUTPUT_DIR";
inline constexpr const char* kVersion = "0.1.0";

using ordered_json = nlohmann::ordered_json;

struct CommonOptions {
  std::string game_path;
  std::string output_dir;
  bool force = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Flags layered over a preset; unset ones keep the preset value.
struct TrainingFlags {
  std::string scale = "desk";
  std::optional<std::size_t> rounds, steps, epochs, window, analyzer_width, mid_width;
  std::optional<double> theta, gamma, lr, tolerance;
  std::string loss = "two_sided";
  std::string alignment = "resulting_state";

  TrainingConfig resolve(const CommonOptions& common) const {
    TrainingConfig c;
    if (scale == "desk") {
      c = TrainingConfig::desk_scale();
    } else if (scale == "full") {
      c = TrainingConfig::full_scale();
    } else {
      throw InputError("--scale must be desk or full");
    }
    if (rounds) c.rounds = *rounds;
    if (steps) c.steps = *steps;
    if (epochs) c.max_epochs = *epochs;
    if (window) c.stability_window = *window;
    if (analyzer_width) c.analyzer_width = *analyzer_width;
    if (mid_width) c.mid_width = *mid_width;
    if (theta) c.theta = *theta;
    if (gamma) c.gamma = *gamma;
    if (lr) c.learning_rate = *lr;
    if (tolerance) c.stability_tolerance = *tolerance;
    if (loss == "two_sided") {
      c.loss = LossForm::kTwoSided;
    } else if (loss == "reinforce") {
      c.loss = LossForm::kReinforce;
    } else {
      throw InputError("--loss must be two_sided or reinforce");
    }
    if (alignment == "resulting_state") {
      c.alignment = RewardAlignment::kResultingState;
    } else if (alignment == "same_index") {
      c.alignment = RewardAlignment::kSameIndex;
    } else {
      throw InputError("--alignment must be resulting_state or same_index");
    }
    c.seed = common.seed;
    c.threads = common.threads;
    return c;
  }

  void bind(CLI::App* app) {
    app->add_option("--scale", scale, "Preset: desk or full")->capture_default_str();
    app->add_option("--rounds,-M", rounds, "Rounds per epoch");
    app->add_option("--steps,-N", steps, "Steps per round");
    app->add_option("--theta", theta, "Step size");
    app->add_option("--gamma", gamma, "Discount");
    app->add_option("--lr", lr, "Adam learning rate");
    app->add_option("--epochs", epochs, "Epoch cap");
    app->add_option("--window", window, "Stability window K");
    app->add_option("--tolerance", tolerance, "Stability tolerance (default 2 theta)");
    app->add_option("--analyzer-width", analyzer_width, "Analyzer width");
    app->add_option("--mid-width", mid_width, "Hidden width");
    app->add_option("--loss", loss, "two_sided or reinforce")->capture_default_str();
    app->add_option("--alignment", alignment, "resulting_state or same_index")
        ->capture_default_str();
  }
};

namespace internal {

inline std::string default_output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env != nullptr && *env != '\0' ? std::string(env) : std::string(".");
}

// Collects every artifact first so nothing is written when any target exists.
class OutputSet {
 public:
  OutputSet(std::string dir, bool force) : dir_(std::move(dir)), force_(force) {}

  std::string add(const std::string& name, std::string content) {
    const std::string path = (std::filesystem::path(dir_) / name).string();
    files_.emplace_back(path, std::move(content));
    return path;
  }

  void commit(std::ostream& out) const {
    if (!force_) {
      for (const auto& [path, _] : files_) {
        if (std::filesystem::exists(path)) {
          throw InputError("refusing to overwrite " + path + " (pass --force)");
        }
      }
    }
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw InputError("cannot create output directory " + dir_ + ": " + ec.message());
    for (const auto& [path, content] : files_) {
      std::ofstream f(path, std::ios::binary | std::ios::trunc);
      if (!f) throw InputError("cannot write " + path);
      f << content;
      if (!f) throw InputError("cannot write " + path);
      out << "wrote " << path << '\n';
    }
  }

 private:
  std::string dir_;
  bool force_;
  std::vector<std::pair<std::string, std::string>> files_;
};

inline ordered_json header(const std::string& command, const CommonOptions& common) {
  ordered_json h;
  h["tool"] = "ceqlab";
  h["version"] = kVersion;
  h["command"] = command;
  h["game"] = common.game_path;
  h["seed"] = common.seed;
  h["threads"] = common.threads;
  return h;
}

inline std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

inline Bimatrix two_player(const NormalFormGame& game) {
  if (game.num_players() != 2) {
    throw InputError("this command needs a two-player game, got " +
                     std::to_string(game.num_players()) + " players");
  }
  return to_bimatrix(game);
}

inline ordered_json ne_json(const NashEquilibrium& ne, const Bimatrix& g) {
  return {{"kind", to_string(ne.kind)},
          {"row_strategy", ne.row_strategy},
          {"col_strategy", ne.col_strategy},
          {"row_payoff", ne.row_payoff},
          {"col_payoff", ne.col_payoff},
          {"joint", ne.joint(g)}};
}

inline std::pair<double, double> parse_point(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(s);
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw InputError("--point expects 'row_payoff,col_payoff', got '" + s + "'");
  }
}

}  // namespace internal

inline int cmd_solve(const CommonOptions& common, const std::string& mode,
                     const std::vector<std::string>& points, std::ostream& stdout_stream) {
  using namespace internal;
  std::ostringstream out;
  const LoadedGame loaded = load_game(common.game_path);
  const Bimatrix g = two_player(loaded.game);
  ordered_json doc;
  doc["config"] = header("solve", common);
  doc["config"]["mode"] = mode;
  doc["mode"] = mode;
  if (mode == "ne") {
    const auto ne = nash_equilibria(g);
    ordered_json list = ordered_json::array();
    for (const auto& e : ne) list.push_back(ne_json(e, g));
    doc["count"] = ne.size();
    doc["equilibria"] = list;
    out << ne.size() << " Nash equilibria\n";
    for (const auto& e : ne) {
      out << "  " << to_string(e.kind) << " payoffs (" << format_double(e.row_payoff) << ", "
          << format_double(e.col_payoff) << ")\n";
    }
  } else if (mode == "ce") {
    const CESolution sol = ce_solve_max_welfare(g);
    const CeCheck check = is_ce(g, sol.distribution.probs());
    doc["distribution"] = sol.distribution.values();
    doc["welfare"] = sol.welfare;
    doc["is_ce"] = check.is_ce;
    doc["max_violation"] = check.max_violation;
    out << "welfare-max CE:";
    for (double p : sol.distribution.values()) out << ' ' << format_double(p);
    out << "\nwelfare " << format_double(sol.welfare) << '\n';
  } else if (mode == "hull") {
    const auto ne = nash_equilibria(g);
    const CESolution sol = ce_solve_max_welfare(g);
    std::vector<std::pair<std::string, std::pair<double, double>>> queries;
    std::vector<double> ce_pair{0.0, 0.0};
    for (std::size_t h = 0; h < g.cells(); ++h) {
      ce_pair[0] += sol.distribution[h] * g.row_payoff[h];
      ce_pair[1] += sol.distribution[h] * g.col_payoff[h];
    }
    queries.push_back({"welfare_max_ce", {ce_pair[0], ce_pair[1]}});
    for (const auto& p : points) queries.push_back({p, parse_point(p)});
    ordered_json list = ordered_json::array();
    for (const auto& e : ne) list.push_back(ne_json(e, g));
    doc["equilibria"] = list;
    ordered_json verdicts = ordered_json::array();
    for (const auto& [label, pt] : queries) {
      const bool inside = ne_hull_contains(ne, pt);
      verdicts.push_back({{"query", label}, {"point", {pt.first, pt.second}}, {"inside", inside}});
      out << label << " (" << format_double(pt.first) << ", " << format_double(pt.second)
          << "): " << (inside ? "inside" : "outside") << " NE hull\n";
    }
    doc["verdicts"] = verdicts;
  } else {
    throw InputError("--mode must be ne, ce or hull");
  }
  OutputSet outputs(common.output_dir, common.force);
  outputs.add("solve_" + mode + ".json", dump(doc));
  outputs.commit(stdout_stream);
  stdout_stream << out.str();
  return kExitOk;
}

inline int cmd_train(const CommonOptions& common, const TrainingFlags& flags,
                     const std::string& main_player, std::ostream& out) {
  using namespace internal;
  const LoadedGame loaded = load_game(common.game_path);
  const NormalFormGame& game = loaded.game;
  two_player(game);
  const TrainingConfig config = flags.resolve(common);
  try {
    config.validate();
  } catch (const PreconditionError& e) {
    throw InputError(e.what());
  } catch (const InvalidArgumentError& e) {
    throw InputError(e.what());
  }
  const std::size_t main = main_player.empty() ? 0 : game.player_index(main_player);
  const std::size_t other = 1 - main;
  const TrainingResult result = train_pair(game.payoff(main), game.payoff(other), config);

  ordered_json cfg = header("train", common);
  cfg["main_player"] = game.player_id(main);
  cfg["training"] = to_json(config);

  std::ostringstream csv;
  write_history_csv(csv, result, {game.player_id(main), game.player_id(other)}, cfg);

  ordered_json state;
  state["config"] = cfg;
  state["stable"] = result.stable;
  state["epochs"] = result.epochs_run;
  state["distribution"] = result.stable_state.values();

  OutputSet outputs(common.output_dir, common.force);
  outputs.add("history.csv", csv.str());
  outputs.add("stable_state.json", dump(state));
  for (std::size_t p = 0; p < 2; ++p) {
    ordered_json ck;
    ck["config"] = cfg;
    ck["player"] = game.player_id(p == 0 ? main : other);
    ck["network"] = to_json(result.networks[p]);
    outputs.add("checkpoint_" + game.player_id(p == 0 ? main : other) + ".json", dump(ck));
  }
  outputs.commit(out);
  out << (result.stable ? "stable" : "not stable") << " after " << result.epochs_run
      << " epochs; P~ =";
  for (double p : result.stable_state.values()) out << ' ' << format_double(p);
  out << '\n';
  return result.stable ? kExitOk : kExitNotConverged;
}

struct EstimateFlags {
  std::string known_player;
  std::string distribution_path;
  bool round_trip = false;
  bool rotate = false;
  bool no_mixed_ne = false;
};

inline int cmd_estimate(const CommonOptions& common, const EstimateFlags& flags,
                        std::ostream& out) {
  using namespace internal;
  const LoadedGame loaded = load_game(common.game_path);
  const NormalFormGame& game = loaded.game;
  if (game.num_players() != 2) throw InputError("estimate needs a two-player game");
  const std::size_t main =
      flags.known_player.empty() ? 0 : game.player_index(flags.known_player);
  if (!game.has_payoff(main)) {
    throw InputError("unknown payoff for player " + game.player_id(main));
  }
  const JointDistribution dist = load_distribution(flags.distribution_path);
  if (dist.size() != game.num_decision_sets()) {
    throw InputError(flags.distribution_path + ": distribution has " +
                     std::to_string(dist.size()) + " entries, game has " +
                     std::to_string(game.num_decision_sets()) + " decision sets");
  }
  const ViewShape shape{game.menu(0).size(), game.menu(1).size(),
                        main == 0 ? MainRole::kRow : MainRole::kColumn};
  EstimationOptions opts;
  opts.rotate_opponent = flags.rotate;
  opts.mixed_ne_constraints = !flags.no_mixed_ne;
  std::vector<std::string> labels;
  for (const auto& ds : game.decision_sets()) labels.push_back(ds.labels[0] + "," + ds.labels[1]);
  EstimationReport report = estimate_payoff(game.payoff(main), dist, shape, opts, labels);
  if (flags.round_trip && report.estimate) {
    report.round_trip = round_trip(game.payoff(main), *report.estimate, shape, dist);
  }

  ordered_json doc;
  doc["config"] = header("estimate", common);
  doc["config"]["known_player"] = game.player_id(main);
  doc["config"]["distribution_file"] = flags.distribution_path;
  doc["config"]["distribution"] = dist.values();
  doc["config"]["round_trip"] = flags.round_trip;
  doc["config"]["rotate"] = flags.rotate;
  doc["config"]["mixed_ne_constraints"] = opts.mixed_ne_constraints;
  doc["report"] = to_json(report);
  const std::size_t other = 1 - main;
  if (report.estimate && game.has_payoff(other)) {
    doc["reference"] = {{"player", game.player_id(other)},
                        {"payoff", game.payoff(other).data()},
                        {"linf", linf_distance(report.estimate->values(),
                                               game.payoff(other).values())}};
  }

  OutputSet outputs(common.output_dir, common.force);
  outputs.add("estimation.json", dump(doc));
  outputs.commit(out);
  out << "status " << to_string(report.status) << '\n';
  if (report.estimate) {
    out << "estimate for " << game.player_id(other) << ":";
    for (double v : report.estimate->values()) out << ' ' << format_double(v);
    out << '\n';
  } else {
    out << "violated families:";
    for (const auto& f : report.violated_families) out << ' ' << f;
    out << '\n';
  }
  if (report.round_trip) {
    out << "round trip " << (report.round_trip->matches ? "matches" : "differs")
        << " (linf " << format_double(report.round_trip->linf) << ")\n";
  }
  return report.feasible() ? kExitOk : kExitPartial;
}

struct PipelineFlags {
  std::vector<std::string> known;
  std::string fallback = "modal_cell";
  bool rotate = false;
  bool no_mixed_ne = false;
};

inline int cmd_pipeline(const CommonOptions& common, const TrainingFlags& tflags,
                        const PipelineFlags& flags, std::ostream& out) {
  using namespace internal;
  const LoadedGame loaded = load_game(common.game_path);
  const NormalFormGame& game = loaded.game;
  PipelineConfig config;
  config.training = tflags.resolve(common);
  try {
    config.training.validate();
  } catch (const PreconditionError& e) {
    throw InputError(e.what());
  } catch (const InvalidArgumentError& e) {
    throw InputError(e.what());
  }
  config.known = flags.known;
  for (const auto& id : config.known) game.player_index(id);
  config.estimation.rotate_opponent = flags.rotate;
  config.estimation.mixed_ne_constraints = !flags.no_mixed_ne;
  if (flags.fallback == "none") {
    config.fallback = EstimationFallback::kNone;
  } else if (flags.fallback == "modal_cell") {
    config.fallback = EstimationFallback::kModalCell;
  } else {
    throw InputError("--fallback must be none or modal_cell");
  }
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    if (!game.has_payoff(i)) throw InputError("unknown payoff for player " + game.player_id(i));
  }

  const PipelineResult result = run_pipeline(game, config);
  ordered_json doc;
  doc["config"] = header("pipeline", common);
  doc["config"]["known"] = config.known.empty() ? std::vector<std::string>{game.player_id(0)}
                                                : config.known;
  const ordered_json manifest = to_json(result, game, config);
  for (const auto& [k, v] : manifest.items()) doc[k] = v;

  OutputSet outputs(common.output_dir, common.force);
  outputs.add("manifest.json", dump(doc));
  outputs.commit(out);
  for (const auto& t : result.tasks) {
    out << t.label << ": " << to_string(t.status)
        << (t.status == TaskStatus::kAnalytic ? " (no interaction)" : "") << '\n';
  }
  out << (result.complete ? "complete" : "partial") << ", " << result.training_runs
      << " training runs\n";
  return result.complete ? kExitOk : kExitPartial;
}

// Entry point shared by the executable and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Correlated-equilibrium lab: solve, train, estimate and run the full pipeline"};
  app.name("ceqlab");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOptions common;
  common.output_dir = internal::default_output_dir();
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("game", common.game_path, "Game JSON file")->required();
    sub->add_option("--output-dir,-o", common.output_dir,
                    "Output directory (default $CEQLAB_OUTPUT_DIR or .)");
    sub->add_flag("--force", common.force, "Overwrite existing outputs");
    sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
    sub->add_option("--threads", common.threads, "Worker cap")->capture_default_str();
  };

  std::string mode = "ce";
  std::vector<std::string> points;
  auto* solve = app.add_subcommand("solve", "Nash equilibria, welfare-max CE or hull test");
  add_common(solve);
  solve->add_option("--mode", mode, "ne, ce or hull")->capture_default_str();
  solve->add_option("--point", points, "Payoff pair 'x,y' for --mode hull");

  TrainingFlags tflags;
  std::string main_player;
  auto* train = app.add_subcommand("train", "Self-play training of a two-player game");
  add_common(train);
  tflags.bind(train);
  train->add_option("--main", main_player, "Main player id (default: first)");

  EstimateFlags eflags;
  auto* estimate = app.add_subcommand("estimate", "Estimate the opponent's payoff vector");
  add_common(estimate);
  estimate->add_option("--known-player", eflags.known_player, "Player whose payoffs are known");
  estimate->add_option("--distribution", eflags.distribution_path, "Distribution JSON")
      ->required();
  estimate->add_flag("--round-trip", eflags.round_trip, "Re-solve the CE with the estimate");
  estimate->add_flag("--rotate", eflags.rotate, "Rotate the opponent's reordered vector");
  estimate->add_flag("--no-mixed-ne", eflags.no_mixed_ne, "Drop the mixed-equilibrium family");

  PipelineFlags pflags;
  TrainingFlags ptflags;
  auto* pipeline = app.add_subcommand("pipeline", "Train and estimate across every player pair");
  add_common(pipeline);
  ptflags.bind(pipeline);
  pipeline->add_option("--known", pflags.known, "Players with given payoffs (default: first)");
  pipeline->add_option("--fallback", pflags.fallback, "none or modal_cell")
      ->capture_default_str();
  pipeline->add_flag("--rotate", pflags.rotate, "Rotate the opponent's reordered vector");
  pipeline->add_flag("--no-mixed-ne", pflags.no_mixed_ne, "Drop the mixed-equilibrium family");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  try {
    if (*solve) return cmd_solve(common, mode, points, out);
    if (*train) return cmd_train(common, tflags, main_player, out);
    if (*estimate) return cmd_estimate(common, eflags, out);
    if (*pipeline) return cmd_pipeline(common, ptflags, pflags, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InvalidArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace ceqlab::cli

#endif  // CEQLAB_CLI_HPP_
