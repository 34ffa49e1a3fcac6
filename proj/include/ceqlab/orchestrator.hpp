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

#ifndef CEQLAB_ORCHESTRATOR_HPP_
#define CEQLAB_ORCHESTRATOR_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ceqlab/distribution.hpp"
#include "ceqlab/equilibrium.hpp"
#include "ceqlab/errors.hpp"
#include "ceqlab/estimation.hpp"
#include "ceqlab/game.hpp"
#include "ceqlab/rng.hpp"
#include "ceqlab/training.hpp"
#include "json.hpp"

namespace ceqlab {

// A two-player view: a plays rows, b columns, everyone else fixed.
struct InteractionTask {
  std::size_t id = 0;
  std::size_t player_a = 0;
  std::size_t player_b = 0;
  std::vector<std::size_t> fixed;  // per player, ignored for a and b
};

// Unordered pairs a < b in lexicographic order, each fanned out over every
// decision combination of the remaining players (last player varying
// fastest).
inline std::vector<InteractionTask> build_task_set(const NormalFormGame& game) {
  const std::size_t n = game.num_players();
  std::vector<InteractionTask> tasks;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      std::vector<std::size_t> others;
      std::size_t combos = 1;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == a || k == b) continue;
        others.push_back(k);
        combos *= game.menu(k).size();
      }
      for (std::size_t c = 0; c < combos; ++c) {
        InteractionTask t{tasks.size(), a, b, std::vector<std::size_t>(n, 0)};
        std::size_t rest = c;
        for (std::size_t i = others.size(); i-- > 0;) {
          t.fixed[others[i]] = rest % game.menu(others[i]).size();
          rest /= game.menu(others[i]).size();
        }
        tasks.push_back(std::move(t));
      }
    }
  }
  return tasks;
}

inline ViewCells task_view(const NormalFormGame& game, const InteractionTask& t) {
  return game.view_cells(t.player_a, t.player_b, t.fixed);
}

inline Bimatrix view_bimatrix(const NormalFormGame& game, const InteractionTask& t) {
  const ViewCells v = task_view(game, t);
  return Bimatrix(v.rows, v.cols, restrict_payoff(game.payoff(t.player_a), v),
                  restrict_payoff(game.payoff(t.player_b), v));
}

// The task's view has at least two Nash equilibria (pure plus 2x2 mixed).
// Both payoffs of the view must be available in `game`.
inline bool against_set(const NormalFormGame& game, const InteractionTask& task) {
  return nash_equilibria(view_bimatrix(game, task)).size() >= 2;
}

inline std::string task_label(const NormalFormGame& game, const InteractionTask& t) {
  std::string s = game.player_id(t.player_a) + "-" + game.player_id(t.player_b);
  for (std::size_t k = 0; k < game.num_players(); ++k) {
    if (k == t.player_a || k == t.player_b) continue;
    s += "|" + game.player_id(k) + "=" + game.menu(k)[t.fixed[k]];
  }
  return s;
}

enum class Provenance { kUnknown, kGiven, kEstimated };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kUnknown: return "unknown";
    case Provenance::kGiven: return "given";
    case Provenance::kEstimated: return "estimated";
  }
  return "?";
}

// Per-player payoff knowledge, tracked per decision set. Estimates of a
// view are written into the full vector scaled by (view cells / H).
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  KnowledgeBase(std::size_t num_players, std::size_t h)
      : values_(num_players, std::vector<double>(h, 0.0)),
        provenance_(num_players, std::vector<Provenance>(h, Provenance::kUnknown)) {}

  void set_given(std::size_t player, const PayoffVector& v) {
    for (std::size_t c = 0; c < v.size(); ++c) {
      values_.at(player)[c] = v[c];
      provenance_[player][c] = Provenance::kGiven;
    }
  }

  void set_estimated(std::size_t player, const ViewCells& view, const PayoffVector& estimate) {
    const double scale =
        static_cast<double>(view.cells.size()) / static_cast<double>(values_[player].size());
    for (std::size_t i = 0; i < view.cells.size(); ++i) {
      const std::size_t c = view.cells[i];
      if (provenance_[player][c] == Provenance::kGiven) continue;
      values_[player][c] = estimate[i] * scale;
      provenance_[player][c] = Provenance::kEstimated;
    }
  }

  bool knows(std::size_t player, const ViewCells& view) const {
    return std::all_of(view.cells.begin(), view.cells.end(), [&](std::size_t c) {
      return provenance_[player][c] != Provenance::kUnknown;
    });
  }

  bool complete(std::size_t player) const {
    return std::none_of(provenance_[player].begin(), provenance_[player].end(),
                        [](Provenance p) { return p == Provenance::kUnknown; });
  }

  // Restricted, renormalized knowledge over the view's cells.
  PayoffVector restricted(std::size_t player, const ViewCells& view) const {
    return PayoffVector(restrict_payoff(PayoffVector(values_[player]), view));
  }

  std::size_t num_players() const { return values_.size(); }
  const std::vector<double>& values(std::size_t player) const { return values_.at(player); }
  const std::vector<Provenance>& provenance(std::size_t player) const {
    return provenance_.at(player);
  }

 private:
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<Provenance>> provenance_;
};

enum class TaskStatus {
  kPending,
  kTrained,       // trained, opponent estimated
  kAnalytic,      // both payoffs known, CE computed without interaction
  kNotAgainst,    // fewer than two Nash equilibria in the view
  kUnstable,      // training hit the epoch cap
  kInfeasible,    // estimation system infeasible
  kStalled,
};

inline const char* to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::kPending: return "pending";
    case TaskStatus::kTrained: return "trained";
    case TaskStatus::kAnalytic: return "analytic";
    case TaskStatus::kNotAgainst: return "not_against";
    case TaskStatus::kUnstable: return "unstable";
    case TaskStatus::kInfeasible: return "infeasible";
    case TaskStatus::kStalled: return "stalled";
  }
  return "?";
}

struct CeRecord {
  JointDistribution distribution;
  double welfare = 0.0;
  CeCheck check;
};

struct TaskOutcome {
  InteractionTask task;
  std::string label;
  TaskStatus status = TaskStatus::kPending;
  std::size_t pass = 0;
  std::optional<std::size_t> main_player;  // known side when trained
  std::size_t epochs = 0;
  std::optional<JointDistribution> learned;
  std::optional<EstimationReport> estimation;
  std::string estimation_input;  // "learned" or "modal_cell"
  std::vector<std::string> learned_violations;  // set when the fallback ran
  std::optional<CeRecord> ce;
};

// What to estimate from when the learned distribution gives an infeasible
// tension system.
enum class EstimationFallback { kNone, kModalCell };

inline const char* to_string(EstimationFallback f) {
  return f == EstimationFallback::kNone ? "none" : "modal_cell";
}

struct PipelineConfig {
  TrainingConfig training = TrainingConfig::desk_scale();
  EstimationOptions estimation;
  EstimationFallback fallback = EstimationFallback::kModalCell;
  std::vector<std::string> known;  // empty = first player only
};

struct PipelineResult {
  KnowledgeBase knowledge;
  std::vector<TaskOutcome> tasks;
  std::size_t training_runs = 0;
  bool complete = false;
};

namespace orchestrator_internal {

inline CeRecord analytic_ce(const Bimatrix& g) {
  CESolution sol = ce_solve_max_welfare(g);
  CeRecord rec{sol.distribution, sol.welfare, {}};
  rec.check = is_ce(g, rec.distribution.probs());
  return rec;
}

}  // namespace orchestrator_internal

// Repeated passes over the task queue. A task is processable once at least
// one side's payoffs over its view are known: with both known the CE is
// computed directly; otherwise the known side trains against the other,
// whose view payoffs are then estimated from the learned distribution. Ends
// when the queue is empty or a full pass makes no progress.
//
// `game` carries every player's true payoffs; the true ones of unknown
// players only drive their own agent during training and the against gate.
inline PipelineResult run_pipeline(const NormalFormGame& game, const PipelineConfig& config) {
  using namespace orchestrator_internal;
  const std::size_t n = game.num_players();
  const std::size_t h = game.num_decision_sets();
  for (std::size_t i = 0; i < n; ++i) {
    if (!game.has_payoff(i)) {
      throw PreconditionError("unknown payoff for player " + game.player_id(i));
    }
  }

  PipelineResult result;
  result.knowledge = KnowledgeBase(n, h);
  std::vector<std::string> known = config.known;
  if (known.empty()) known.push_back(game.player_id(0));
  for (const auto& id : known) result.knowledge.set_given(game.player_index(id), game.payoff(game.player_index(id)));

  for (const auto& t : build_task_set(game)) {
    TaskOutcome o;
    o.task = t;
    o.label = task_label(game, t);
    result.tasks.push_back(std::move(o));
  }

  KnowledgeBase& kb = result.knowledge;
  std::size_t pass = 0;
  for (bool progress = true; progress;) {
    progress = false;
    ++pass;
    for (TaskOutcome& o : result.tasks) {
      if (o.status != TaskStatus::kPending) continue;
      const InteractionTask& t = o.task;
      const ViewCells view = task_view(game, t);
      const bool know_a = kb.knows(t.player_a, view);
      const bool know_b = kb.knows(t.player_b, view);
      if (!know_a && !know_b) continue;
      progress = true;
      o.pass = pass;

      if (know_a && know_b) {
        o.status = TaskStatus::kAnalytic;
        o.ce = analytic_ce(Bimatrix(view.rows, view.cols, kb.restricted(t.player_a, view).data(),
                                    kb.restricted(t.player_b, view).data()));
        continue;
      }
      if (!against_set(game, t)) {
        o.status = TaskStatus::kNotAgainst;
        continue;
      }

      const std::size_t main = know_a ? t.player_a : t.player_b;
      const std::size_t other = know_a ? t.player_b : t.player_a;
      o.main_player = main;
      const PayoffVector v_main = kb.restricted(main, view);
      const PayoffVector v_other(restrict_payoff(game.payoff(other), view));

      TrainingConfig tc = config.training;
      tc.seed = derive_stream({config.training.seed, t.id, 0x7461736bull})();
      const TrainingResult tr = train_pair(v_main, v_other, tc);
      ++result.training_runs;
      o.epochs = tr.epochs_run;
      o.learned = tr.stable_state;
      if (!tr.stable) {
        o.status = TaskStatus::kUnstable;
        continue;
      }

      std::vector<std::string> labels;
      for (std::size_t c : view.cells) {
        std::string s;
        for (const auto& l : game.decision_sets()[c].labels) s += (s.empty() ? "" : ",") + l;
        labels.push_back(s);
      }
      const ViewShape shape{view.rows, view.cols, know_a ? MainRole::kRow : MainRole::kColumn};
      EstimationReport rep = estimate_payoff(v_main, tr.stable_state, shape, config.estimation,
                                             labels);
      o.estimation_input = "learned";
      if (!rep.feasible() && config.fallback == EstimationFallback::kModalCell) {
        const auto& p = tr.stable_state.values();
        const auto mode = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
        o.learned_violations = rep.violated_families;
        rep = estimate_payoff(v_main, JointDistribution::point_mass(p.size(), mode), shape,
                              config.estimation, labels);
        o.estimation_input = "modal_cell";
      }
      if (!rep.feasible()) {
        o.status = TaskStatus::kInfeasible;
        o.estimation = std::move(rep);
        continue;
      }
      kb.set_estimated(other, view, *rep.estimate);
      o.estimation = std::move(rep);
      o.status = TaskStatus::kTrained;
      o.ce = analytic_ce(Bimatrix(view.rows, view.cols, kb.restricted(t.player_a, view).data(),
                                  kb.restricted(t.player_b, view).data()));
    }
  }

  result.complete = true;
  for (TaskOutcome& o : result.tasks) {
    if (o.status == TaskStatus::kPending) o.status = TaskStatus::kStalled;
    if (o.status != TaskStatus::kTrained && o.status != TaskStatus::kAnalytic) {
      result.complete = false;
    }
  }
  return result;
}

inline nlohmann::ordered_json to_json(const PipelineResult& r, const NormalFormGame& game,
                                      const PipelineConfig& config) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["format"] = "ceqlab.manifest.v1";
  j["status"] = r.complete ? "complete" : "partial";
  j["seed"] = config.training.seed;
  j["training"] = to_json(config.training);
  j["estimation"] = {{"rotate_opponent", config.estimation.rotate_opponent},
                     {"mixed_ne_constraints", config.estimation.mixed_ne_constraints},
                     {"fallback", to_string(config.fallback)}};
  j["players"] = game.players();
  j["training_runs"] = r.training_runs;

  ordered_json tasks = ordered_json::array();
  for (const TaskOutcome& o : r.tasks) {
    ordered_json t;
    t["id"] = o.task.id;
    t["label"] = o.label;
    t["player_a"] = game.player_id(o.task.player_a);
    t["player_b"] = game.player_id(o.task.player_b);
    ordered_json fixed = ordered_json::object();
    for (std::size_t k = 0; k < game.num_players(); ++k) {
      if (k == o.task.player_a || k == o.task.player_b) continue;
      fixed[game.player_id(k)] = game.menu(k)[o.task.fixed[k]];
    }
    t["fixed"] = fixed;
    t["status"] = to_string(o.status);
    t["interaction"] = o.status == TaskStatus::kAnalytic ? "none" : "trained";
    t["pass"] = o.pass;
    if (o.main_player) t["main_player"] = game.player_id(*o.main_player);
    if (o.epochs > 0) t["epochs"] = o.epochs;
    if (o.learned) t["learned_distribution"] = o.learned->values();
    if (o.estimation) {
      t["estimation"] = {{"input", o.estimation_input},
                         {"learned_violated_families", o.learned_violations},
                         {"status", to_string(o.estimation->status)},
                         {"estimate", o.estimation->estimate
                                          ? ordered_json(o.estimation->estimate->data())
                                          : ordered_json(nullptr)},
                         {"max_violation", o.estimation->max_violation},
                         {"violated_families", o.estimation->violated_families}};
    }
    if (o.ce) {
      t["ce"] = {{"distribution", o.ce->distribution.values()},
                 {"welfare", o.ce->welfare},
                 {"is_ce", o.ce->check.is_ce},
                 {"max_violation", o.ce->check.max_violation}};
    }
    tasks.push_back(std::move(t));
  }
  j["tasks"] = tasks;

  ordered_json know = ordered_json::object();
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    ordered_json prov = ordered_json::array();
    for (Provenance p : r.knowledge.provenance(i)) prov.push_back(to_string(p));
    know[game.player_id(i)] = {{"complete", r.knowledge.complete(i)},
                               {"values", r.knowledge.values(i)},
                               {"provenance", prov}};
  }
  j["knowledge"] = know;
  return j;
}

}  // namespace ceqlab

#endif  // CEQLAB_ORCHESTRATOR_HPP_
