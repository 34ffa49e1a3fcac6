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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ceqlab/ceqlab.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "properties.hpp"

namespace ceqlab {
namespace {

namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Game(const std::string& name) { return std::string(CEQLAB_GAMES_DIR) + "/" + name; }

std::string Fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::string Vec(const std::vector<double>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + Fmt("%.4f", v[i]);
  return s + "}";
}

oracle::Game2x2 ToOracle(const Bimatrix& g) {
  oracle::Game2x2 o;
  for (std::size_t h = 0; h < 4; ++h) {
    o.row[h] = g.row_payoff[h];
    o.col[h] = g.col_payoff[h];
  }
  return o;
}

Bimatrix FromOracle(const oracle::Game2x2& g) {
  return Bimatrix(2, 2, {g.row.begin(), g.row.end()}, {g.col.begin(), g.col.end()});
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Verdict CeOnChicken() {
  const auto t0 = std::chrono::steady_clock::now();
  const Bimatrix g = to_bimatrix(load_game(Game("chicken.json")).game);
  const CESolution sol = ce_solve_max_welfare(g);
  const CeCheck check = is_ce(g, sol.distribution.probs());
  const double lp_time = Seconds(t0);
  // The fixture's payoffs carry ten decimals; use the same slack as is_ce.
  const oracle::OracleOptimum grid = oracle::grid_ce_optimum(ToOracle(g), 0.01, kCeTolerance);
  const bool ok = sol.distribution[3] <= 1e-12 && check.is_ce &&
                  std::abs(sol.welfare - grid.welfare) <= 1e-3 && lp_time < 1.0;
  return {ok, "CE " + Vec(sol.distribution.values()) + " welfare " + Fmt("%.6f", sol.welfare) +
                  ", grid " + Fmt("%.6f", grid.welfare) + ", " + Fmt("%.4f s", lp_time)};
}

Verdict ReferenceDistribution() {
  const Bimatrix g = to_bimatrix(load_game(Game("reference_game.json")).game);
  const CESolution sol = ce_solve_max_welfare(g);
  const CeCheck check = is_ce(g, sol.distribution.probs());
  const oracle::Game2x2 o = ToOracle(g);
  const oracle::OracleOptimum grid = oracle::grid_ce_optimum(o, 0.01, kCeTolerance);
  const std::array<double, 4> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0};
  const double gain = oracle::max_deviation_gain(o, thirds);
  const bool solver_ok = check.is_ce && std::abs(sol.welfare - grid.welfare) <= 1e-3;
  std::string detail = "solver CE " + Vec(sol.distribution.values()) + " welfare " +
                       Fmt("%.4f", sol.welfare) + " (grid " + Fmt("%.4f", grid.welfare) + "); ";
  if (gain <= 1e-9) {
    detail += "{1/3,1/3,1/3,0} confirmed as a CE";
  } else {
    detail += "documented divergence: {1/3,1/3,1/3,0} is not a CE of the declared payoffs "
              "(a deviation gains " + Fmt("%.4f", gain) + "); U and L are strictly dominant";
  }
  return {solver_ok, detail};
}

Verdict OracleEquivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20260101);
  double worst_gain = -1.0;
  double worst_slack = 1.0;
  for (int i = 0; i < 100; ++i) {
    const oracle::Game2x2 o = oracle::random_valid_game(rng);
    const Bimatrix g = FromOracle(o);
    const CESolution sol = ce_solve_max_welfare(g);
    std::array<double, 4> p{};
    for (std::size_t h = 0; h < 4; ++h) p[h] = sol.distribution[h];
    worst_gain = std::max(worst_gain, oracle::max_deviation_gain(o, p));
    for (const auto& ne : nash_equilibria(g)) {
      worst_slack = std::min(worst_slack, sol.welfare - (ne.row_payoff + ne.col_payoff));
    }
  }
  const double secs = Seconds(t0);
  return {worst_gain <= 1e-9 && worst_slack >= -1e-9 && secs < 10.0,
          "max deviation gain " + Fmt("%.2e", worst_gain) + ", min welfare slack " +
              Fmt("%.2e", worst_slack) + ", " + Fmt("%.2f s", secs)};
}

Verdict GradientFidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (LossForm form : {LossForm::kTwoSided, LossForm::kReinforce}) {
      worst = std::max(worst, gradcheck::Check(seed, form).max_relative_error);
    }
  }
  const double secs = Seconds(t0);
  return {worst < 1e-4 && secs < 30.0,
          "max relative error " + Fmt("%.2e", worst) + " over 5 networks, " + Fmt("%.2f s", secs)};
}

Verdict RewardShaping() {
  const auto failure = properties::RewardShaping(5, 1000);
  return {!failure, failure ? *failure : "1000 random tensors"};
}

Verdict EnvironmentFuzz() {
  const auto failure = properties::EnvironmentFuzz(6, 10000);
  return {!failure, failure ? *failure : "10000 random sequences"};
}

Verdict LearningTrend() {
  const NormalFormGame g = load_game(Game("reference_game.json")).game;
  int good = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto t0 = std::chrono::steady_clock::now();
    TrainingConfig c = TrainingConfig::desk_scale();
    c.seed = seed;
    const TrainingResult r = train_pair(g.payoff(0), g.payoff(1), c);
    const double secs = Seconds(t0);
    const auto& last = r.history;
    const double r0 = last[last.size() - 2].mean_terminal_reward;
    const double r1 = last[last.size() - 1].mean_terminal_reward;
    const bool ok = r.stable && r0 >= 0.28 && r1 >= 0.28 && secs <= 600.0;
    good += ok;
    detail += "seed " + std::to_string(seed) + ": " + (r.stable ? "stable" : "unstable") +
              " at epoch " + std::to_string(r.epochs_run) + ", rewards " + Fmt("%.4f", r0) +
              "/" + Fmt("%.4f", r1) + ", " + Fmt("%.1f s", secs) + "; ";
  }
  return {good >= 2, detail + std::to_string(good) + "/3 seeds meet the bar"};
}

bool VectorIsFeasible(const EstimationReport& r) {
  if (!r.feasible() || !r.estimate) return false;
  double sum = 0.0;
  for (double x : r.estimate->data()) {
    if (x < 0.0) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= 1e-9 && r.max_violation <= 1e-9;
}

Verdict EstimationRoundTrip() {
  const NormalFormGame reference = load_game(Game("reference_game.json")).game;
  const ViewShape shape{2, 2, MainRole::kRow};
  const CESolution ce = ce_solve_max_welfare(to_bimatrix(reference));
  const EstimationReport r = estimate_payoff(reference.payoff(0), ce.distribution, shape);
  std::string detail;
  bool reference_ok = VectorIsFeasible(r);
  if (reference_ok) {
    const RoundTripCheck rt = round_trip(reference.payoff(0), *r.estimate, shape, ce.distribution);
    reference_ok = rt.matches;
    detail = "reference game estimate " + Vec(r.estimate->data()) + ", round trip L-inf " +
             Fmt("%.2e", rt.linf) + "; ";
  } else {
    detail = "reference game infeasible, families:";
    for (const auto& f : r.violated_families) detail += " " + f;
    detail += "; ";
  }

  std::mt19937_64 rng(8);
  int feasible = 0;
  int matched = 0;
  std::string failures;
  for (int i = 0; i < 20; ++i) {
    const Bimatrix g = FromOracle(oracle::random_valid_game(rng));
    const CESolution sol = ce_solve_max_welfare(g);
    const PayoffVector main(g.row_payoff);
    const EstimationReport e = estimate_payoff(main, sol.distribution, shape);
    if (!VectorIsFeasible(e)) {
      failures += " #" + std::to_string(i) + "(";
      for (std::size_t k = 0; k < e.violated_families.size(); ++k) {
        failures += (k ? "," : "") + e.violated_families[k];
      }
      failures += ")";
      continue;
    }
    ++feasible;
    matched += round_trip(main, *e.estimate, shape, sol.distribution).matches;
  }
  detail += "random games feasible " + std::to_string(feasible) + "/20, round-trip match " +
            std::to_string(matched) + "/" + std::to_string(feasible);
  if (!failures.empty()) detail += ", infeasible:" + failures;
  return {reference_ok && feasible == 20, detail};
}

Verdict EndToEnd() {
  const NormalFormGame g = load_game(Game("three_player.json")).game;
  PipelineConfig c;
  c.training.seed = 1;
  const PipelineResult r = run_pipeline(g, c);
  const auto manifest = to_json(r, g, c);
  bool manifest_ok = manifest["format"] == "ceqlab.manifest.v1" &&
                     manifest["tasks"].size() == r.tasks.size();
  for (const auto& t : manifest["tasks"]) {
    manifest_ok = manifest_ok && t.contains("status") && t.contains("label");
  }
  bool all_ce = true;
  bool p23_analytic = false;
  std::string statuses;
  for (const auto& t : r.tasks) {
    statuses += " " + t.label + "=" + to_string(t.status);
    if (t.ce) all_ce = all_ce && t.ce->check.is_ce;
    if (t.task.player_a == 1 && t.task.player_b == 2) {
      p23_analytic = t.status == TaskStatus::kAnalytic;
    }
  }
  return {r.complete && p23_analytic && all_ce && manifest_ok,
          std::string(r.complete ? "complete" : "partial") + ", " +
              std::to_string(r.training_runs) + " training runs;" + statuses};
}

Verdict Reproducibility() {
  const fs::path base = fs::temp_directory_path() /
                        ("ceqlab_accept_" + std::to_string(std::random_device{}()));
  std::string csv[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = base / std::to_string(i);
    std::ostringstream out, err;
    const int code = cli::run({"train", Game("reference_game.json"), "--seed", "42", "--epochs",
                               "20", "-o", dir.string()},
                              out, err);
    if (code != cli::kExitOk && code != cli::kExitNotConverged) {
      fs::remove_all(base);
      return {false, "train exited " + std::to_string(code) + ": " + err.str()};
    }
    std::ifstream in(dir / "history.csv", std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    csv[i] = ss.str();
  }
  fs::remove_all(base);
  return {!csv[0].empty() && csv[0] == csv[1],
          "history.csv " + std::to_string(csv[0].size()) + " bytes, " +
              (csv[0] == csv[1] ? "identical" : "different")};
}

}  // namespace
}  // namespace ceqlab

int main() {
  using namespace ceqlab;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"CE solver on chicken", CeOnChicken},
      {"declared game distribution check", ReferenceDistribution},
      {"oracle equivalence on 100 random games", OracleEquivalence},
      {"gradient fidelity", GradientFidelity},
      {"reward-shaping invariants", RewardShaping},
      {"environment fuzz", EnvironmentFuzz},
      {"learning trend at desk scale", LearningTrend},
      {"estimation round trip", EstimationRoundTrip},
      {"three-player pipeline", EndToEnd},
      {"training reproducibility", Reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): "
              << (v.pass ? "PASS" : "FAIL") << " | " << v.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
