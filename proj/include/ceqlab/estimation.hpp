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

#ifndef CEQLAB_ESTIMATION_HPP_
#define CEQLAB_ESTIMATION_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ceqlab/distribution.hpp"
#include "ceqlab/equilibrium.hpp"
#include "ceqlab/errors.hpp"
#include "ceqlab/game.hpp"
#include "ceqlab/lp.hpp"
#include "json.hpp"

namespace ceqlab {

inline constexpr double kRoundTripTolerance = 1e-6;
inline constexpr double kConstraintSlack = 1e-9;

// Sorted view of the known payoff vector and the stable distribution.
// Position k of every reordered sequence refers to decision set
// permutation[k]; the opponent unknown carried at position k is
// opponent_index[k] (equal to permutation[k] unless rotated).
struct ReorderedView {
  std::vector<std::size_t> permutation;
  std::vector<std::size_t> opponent_index;
  std::vector<double> v_bar_main;
  std::vector<double> p_bar;
  std::vector<std::string> d_bar;

  std::size_t size() const { return permutation.size(); }
};

// Stable ascending sort keyed by the main player's payoffs. With `rotate`,
// the opponent's reordered unknowns are additionally shifted so that the
// first one moves to the end.
inline ReorderedView reorder(const PayoffVector& v_main, const JointDistribution& p_tilde,
                             bool rotate = false, const std::vector<std::string>& labels = {}) {
  const std::size_t h = v_main.size();
  if (p_tilde.size() != h) throw InvalidArgumentError("reorder: distribution size mismatch");
  ReorderedView view;
  view.permutation.resize(h);
  std::iota(view.permutation.begin(), view.permutation.end(), std::size_t{0});
  std::stable_sort(view.permutation.begin(), view.permutation.end(),
                   [&](std::size_t a, std::size_t b) { return v_main[a] < v_main[b]; });
  for (std::size_t k = 0; k < h; ++k) {
    const std::size_t orig = view.permutation[k];
    view.v_bar_main.push_back(v_main[orig]);
    view.p_bar.push_back(p_tilde[orig]);
    view.opponent_index.push_back(rotate ? view.permutation[(k + 1) % h] : orig);
    if (!labels.empty()) view.d_bar.push_back(labels.at(orig));
  }
  return view;
}

enum class ConstraintSense { kGreaterEqual, kEqual, kLessEqual };

inline const char* to_string(ConstraintSense s) {
  switch (s) {
    case ConstraintSense::kGreaterEqual: return ">=";
    case ConstraintSense::kEqual: return "=";
    case ConstraintSense::kLessEqual: return "<=";
  }
  return "?";
}

enum class ForceKind { kOutgoing, kIncoming };

inline const char* to_string(ForceKind k) {
  return k == ForceKind::kOutgoing ? "outgoing" : "incoming";
}

// coefficients . x + constant (sense) 0, with x the opponent unknowns in
// reordered order.
struct TensionConstraint {
  ForceKind kind = ForceKind::kOutgoing;
  std::size_t window = 1;
  std::size_t anchor = 0;  // reordered position h (0-based)
  std::vector<double> coefficients;
  double constant = 0.0;
  ConstraintSense sense = ConstraintSense::kEqual;

  double value(std::span<const double> x) const {
    double v = constant;
    for (std::size_t k = 0; k < x.size(); ++k) v += coefficients[k] * x[k];
    return v;
  }

  // Amount by which x violates the constraint; <= 0 when satisfied.
  double violation(std::span<const double> x) const {
    const double v = value(x);
    switch (sense) {
      case ConstraintSense::kGreaterEqual: return -v;
      case ConstraintSense::kLessEqual: return v;
      case ConstraintSense::kEqual: return std::abs(v);
    }
    return 0.0;
  }
};

struct UnmatchedOrdering {
  ForceKind kind;
  std::size_t window;
  std::size_t anchor;
};

struct TensionSet {
  std::vector<TensionConstraint> constraints;
  // Orderings of (rho[h-L], rho[h], rho[h+L]) that match no sense rule.
  std::vector<UnmatchedOrdering> unmatched;
};

inline std::size_t max_window(std::size_t h) { return std::max<std::size_t>(1, h / 2); }

// Outgoing and incoming net-force constraints for windows L = 1..floor(H/2),
// indices cyclic mod H. With x the opponent's reordered payoffs:
//   outgoing  f_h = p[h+L] (v[h+L] - v[h]) - p[h-L] (x[h-L] - x[h])
//   incoming  f_h = p[h] (v[h] - v[h-L]) - p[h] (x[h] - x[j])
// where j = h-L except at the last position, where j = L-1.
inline TensionSet build_tension_constraints(const ReorderedView& view) {
  const std::size_t h_count = view.size();
  TensionSet out;
  if (h_count < 2) return out;
  const auto& p = view.p_bar;
  const auto& v = view.v_bar_main;
  auto wrap = [h_count](std::ptrdiff_t i) {
    const auto n = static_cast<std::ptrdiff_t>(h_count);
    return static_cast<std::size_t>(((i % n) + n) % n);
  };
  for (std::size_t window = 1; window <= max_window(h_count); ++window) {
    for (ForceKind kind : {ForceKind::kOutgoing, ForceKind::kIncoming}) {
      for (std::size_t h = 0; h < h_count; ++h) {
        const auto hi = static_cast<std::ptrdiff_t>(h);
        const auto w = static_cast<std::ptrdiff_t>(window);
        const std::size_t before = wrap(hi - w);
        const std::size_t after = wrap(hi + w);
        const double pm = p[before];
        const double p0 = p[h];
        const double pp = p[after];

        std::optional<ConstraintSense> sense;
        if (kind == ForceKind::kOutgoing) {
          if (pm < p0 && p0 <= pp) {
            sense = ConstraintSense::kGreaterEqual;
          } else if (pm <= p0 && pp <= p0) {
            sense = ConstraintSense::kEqual;
          } else if (pm > p0 && p0 >= pp) {
            sense = ConstraintSense::kLessEqual;
          }
        } else {
          if (pm > p0 && p0 >= pp) {
            sense = ConstraintSense::kGreaterEqual;
          } else if (pm <= p0 && pp <= p0) {
            sense = ConstraintSense::kEqual;
          } else if (pm < p0 && p0 <= pp) {
            sense = ConstraintSense::kLessEqual;
          }
        }
        if (!sense) {
          out.unmatched.push_back({kind, window, h});
          continue;
        }

        TensionConstraint c;
        c.kind = kind;
        c.window = window;
        c.anchor = h;
        c.sense = *sense;
        c.coefficients.assign(h_count, 0.0);
        if (kind == ForceKind::kOutgoing) {
          c.constant = pp * (v[after] - v[h]);
          c.coefficients[before] -= pm;
          c.coefficients[h] += pm;
        } else {
          const std::size_t j = h + 1 == h_count ? window - 1 : before;
          c.constant = p0 * (v[h] - v[before]);
          c.coefficients[h] -= p0;
          c.coefficients[j] += p0;
        }
        out.constraints.push_back(std::move(c));
      }
    }
  }
  return out;
}

// Which side of a two-player view the known (main) payoff vector belongs to.
enum class MainRole { kRow, kColumn };

struct ViewShape {
  std::size_t rows = 2;
  std::size_t cols = 2;
  MainRole role = MainRole::kRow;
};

struct LinearRow {
  std::string label;
  std::vector<double> coefficients;  // over original decision-set indices
  double constant = 0.0;
  ConstraintSense sense = ConstraintSense::kGreaterEqual;
};

struct MixedNeFamily {
  bool applicable = false;
  std::string note;
  std::vector<LinearRow> rows;
  // Main player's mixing probability on its first decision implied by the
  // estimated opponent's indifference; absent if the opponent is indifferent
  // everywhere.
  std::optional<double> implied_probability;
  // Opponent differences are x[c0] - x[c1] and x[c2] - x[c3].
  std::array<std::size_t, 4> opponent_cells{};
};

// Sign constraints that make the estimated opponent's 2x2 indifference
// system solvable with a mixing probability in [0, 1]: its payoff
// differences across its own decisions must follow the main player's sign
// pattern (both players with two pure equilibria). Applies only when the
// main player's own differences have opposite signs.
inline MixedNeFamily build_mixed_ne_family(const PayoffVector& v_main, const ViewShape& shape) {
  MixedNeFamily fam;
  if (shape.rows != 2 || shape.cols != 2 || v_main.size() != 4) {
    fam.note = "mixed-strategy family needs a 2x2 view";
    return fam;
  }
  // cells: 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1)
  double first = 0.0;
  double second = 0.0;
  std::array<std::size_t, 4> opp{};  // (a, b) index pairs of the opponent differences
  if (shape.role == MainRole::kRow) {
    first = v_main[0] - v_main[2];
    second = v_main[1] - v_main[3];
    opp = {0, 1, 2, 3};
  } else {
    first = v_main[0] - v_main[1];
    second = v_main[2] - v_main[3];
    opp = {0, 2, 1, 3};
  }
  if (!(first * second < 0.0)) {
    fam.note = "main player's differences share a sign; no mixed equilibrium to match";
    return fam;
  }
  fam.applicable = true;
  fam.opponent_cells = opp;
  auto make_row = [](const std::string& label, std::size_t a, std::size_t b, double sign) {
    LinearRow r{label, std::vector<double>(4, 0.0), 0.0, ConstraintSense::kGreaterEqual};
    r.coefficients[a] = sign;
    r.coefficients[b] = -sign;
    return r;
  };
  fam.rows.push_back(make_row("opponent difference 1", opp[0], opp[1], first > 0 ? 1.0 : -1.0));
  fam.rows.push_back(make_row("opponent difference 2", opp[2], opp[3], second > 0 ? 1.0 : -1.0));
  return fam;
}

struct RoundTripCheck {
  JointDistribution distribution;
  double linf = 0.0;
  bool matches = false;
};

inline Bimatrix assemble_view(const PayoffVector& v_main, const PayoffVector& v_opponent,
                              const ViewShape& shape) {
  if (shape.role == MainRole::kRow) {
    return Bimatrix(shape.rows, shape.cols, v_main.data(), v_opponent.data());
  }
  return Bimatrix(shape.rows, shape.cols, v_opponent.data(), v_main.data());
}

// Re-solves the welfare-maximizing CE with the estimate standing in for the
// opponent and compares it against the reference distribution.
inline RoundTripCheck round_trip(const PayoffVector& v_main, const PayoffVector& estimate,
                                 const ViewShape& shape, const JointDistribution& reference) {
  CESolution sol = ce_solve_max_welfare(assemble_view(v_main, estimate, shape));
  RoundTripCheck rt;
  rt.distribution = sol.distribution;
  rt.linf = linf_distance(sol.distribution.probs(), reference.probs());
  rt.matches = rt.linf <= kRoundTripTolerance;
  return rt;
}

struct EstimationOptions {
  bool rotate_opponent = false;
  bool mixed_ne_constraints = true;
};

struct EstimationReport {
  LpStatus status = LpStatus::kInfeasible;
  ReorderedView view;
  TensionSet tension;
  MixedNeFamily mixed;
  std::optional<PayoffVector> estimate;  // original decision-set order
  double max_violation = 0.0;            // over all emitted constraints
  std::vector<std::string> violated_families;
  std::optional<RoundTripCheck> round_trip;

  bool feasible() const { return status == LpStatus::kOptimal; }
};

namespace estimation_internal {

inline std::string family_name(ForceKind kind, std::size_t window) {
  return std::string(to_string(kind)) + "_L" + std::to_string(window);
}

inline void add_row(LinearProgram& lp, std::vector<double> coef, double constant,
                    ConstraintSense sense) {
  switch (sense) {
    case ConstraintSense::kGreaterEqual: lp.add_ge(std::move(coef), -constant); break;
    case ConstraintSense::kLessEqual: lp.add_le(std::move(coef), -constant); break;
    case ConstraintSense::kEqual: lp.add_eq(std::move(coef), -constant); break;
  }
}

// Coefficients over original indices mapped onto reordered LP variables.
inline std::vector<double> to_lp_space(const ReorderedView& view,
                                       const std::vector<double>& original) {
  std::vector<double> out(view.size(), 0.0);
  for (std::size_t k = 0; k < view.size(); ++k) out[k] = original[view.opponent_index[k]];
  return out;
}

inline LinearProgram build_lp(const ReorderedView& view, const TensionSet& tension,
                              const MixedNeFamily& mixed, const JointDistribution& p_tilde,
                              const std::string& skip_family, bool skip_simplex) {
  const std::size_t h = view.size();
  LinearProgram lp(h);
  for (std::size_t k = 0; k < h; ++k) lp.objective[k] = p_tilde[view.opponent_index[k]];
  if (skip_simplex) {
    for (auto& b : lp.bounds) b = {-kInf, kInf};
  } else {
    lp.add_eq(std::vector<double>(h, 1.0), 1.0);
  }
  for (const auto& c : tension.constraints) {
    if (family_name(c.kind, c.window) == skip_family) continue;
    add_row(lp, c.coefficients, c.constant, c.sense);
  }
  if (mixed.applicable && skip_family != "mixed_ne") {
    for (const auto& r : mixed.rows) {
      add_row(lp, to_lp_space(view, r.coefficients), r.constant, r.sense);
    }
  }
  return lp;
}

}  // namespace estimation_internal

// Estimates the opponent's payoff vector from the main player's vector and a
// stable (correlated-equilibrium) distribution: maximize p_tilde . v over
// v >= 0, sum v = 1, the tension constraints and the mixed-strategy family.
// An infeasible system is reported with the families whose removal restores
// feasibility; nothing is relaxed.
inline EstimationReport estimate_payoff(const PayoffVector& v_main,
                                        const JointDistribution& p_tilde,
                                        const ViewShape& shape,
                                        const EstimationOptions& options = {},
                                        const std::vector<std::string>& labels = {}) {
  using namespace estimation_internal;
  if (v_main.size() != p_tilde.size() || v_main.size() != shape.rows * shape.cols) {
    throw InvalidArgumentError("estimate_payoff: sizes of payoff, distribution and view differ");
  }
  EstimationReport report;
  report.view = reorder(v_main, p_tilde, options.rotate_opponent, labels);
  report.tension = build_tension_constraints(report.view);
  if (options.mixed_ne_constraints) {
    report.mixed = build_mixed_ne_family(v_main, shape);
  } else {
    report.mixed.note = "disabled";
  }

  const LpSolution sol = solve_lp(build_lp(report.view, report.tension, report.mixed, p_tilde,
                                           "", false));
  report.status = sol.status;
  if (sol.status != LpStatus::kOptimal) {
    std::vector<std::string> families;
    for (std::size_t w = 1; w <= max_window(report.view.size()); ++w) {
      for (ForceKind kind : {ForceKind::kOutgoing, ForceKind::kIncoming}) {
        const std::string name = family_name(kind, w);
        const bool present = std::any_of(
            report.tension.constraints.begin(), report.tension.constraints.end(),
            [&](const TensionConstraint& c) { return family_name(c.kind, c.window) == name; });
        if (present) families.push_back(name);
      }
    }
    if (report.mixed.applicable) families.push_back("mixed_ne");
    for (const auto& f : families) {
      const auto relaxed =
          solve_lp(build_lp(report.view, report.tension, report.mixed, p_tilde, f, false));
      if (relaxed.status == LpStatus::kOptimal) report.violated_families.push_back(f);
    }
    if (report.violated_families.empty()) {
      const auto no_simplex =
          solve_lp(build_lp(report.view, report.tension, report.mixed, p_tilde, "", true));
      if (no_simplex.status != LpStatus::kInfeasible) {
        report.violated_families.push_back("simplex");
      } else {
        report.violated_families = families;
      }
    }
    return report;
  }

  const std::vector<double>& x = sol.x;
  std::vector<double> original(x.size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    original[report.view.opponent_index[k]] = std::max(x[k], 0.0);
  }
  double sum = std::accumulate(original.begin(), original.end(), 0.0);
  for (double& v : original) v /= sum;
  report.estimate = PayoffVector(original);

  std::vector<double> reordered(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) reordered[k] = original[report.view.opponent_index[k]];
  for (const auto& c : report.tension.constraints) {
    report.max_violation = std::max(report.max_violation, c.violation(reordered));
  }
  if (report.mixed.applicable) {
    for (const auto& r : report.mixed.rows) {
      TensionConstraint as_row{ForceKind::kOutgoing, 0, 0, r.coefficients, r.constant, r.sense};
      report.max_violation = std::max(report.max_violation, as_row.violation(original));
    }
    const auto& c = report.mixed.opponent_cells;
    const double d1 = original[c[0]] - original[c[1]];
    const double d2 = original[c[2]] - original[c[3]];
    if (d1 - d2 != 0.0) {
      const double p = -d2 / (d1 - d2);
      report.mixed.implied_probability = p;
      if (p < -kConstraintSlack || p > 1.0 + kConstraintSlack) {
        report.status = LpStatus::kInfeasible;
        report.violated_families.push_back("mixed_ne");
        report.estimate.reset();
      }
    }
  }
  return report;
}

inline nlohmann::ordered_json to_json(const TensionConstraint& c) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(c.kind);
  j["window"] = c.window;
  j["anchor"] = c.anchor + 1;
  j["coefficients"] = c.coefficients;
  j["constant"] = c.constant;
  j["sense"] = to_string(c.sense);
  return j;
}

// Positions and indices are 1-based in the report.
inline nlohmann::ordered_json to_json(const EstimationReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["status"] = to_string(r.status);
  ordered_json perm = ordered_json::array();
  ordered_json opp = ordered_json::array();
  for (std::size_t k = 0; k < r.view.size(); ++k) {
    perm.push_back(r.view.permutation[k] + 1);
    opp.push_back(r.view.opponent_index[k] + 1);
  }
  j["permutation"] = perm;
  j["opponent_index"] = opp;
  j["v_bar_main"] = r.view.v_bar_main;
  j["p_bar"] = r.view.p_bar;
  if (!r.view.d_bar.empty()) j["d_bar"] = r.view.d_bar;

  ordered_json cons = ordered_json::array();
  for (const auto& c : r.tension.constraints) cons.push_back(to_json(c));
  j["constraints"] = cons;
  ordered_json unmatched = ordered_json::array();
  for (const auto& u : r.tension.unmatched) {
    unmatched.push_back({{"kind", to_string(u.kind)}, {"window", u.window}, {"anchor", u.anchor + 1}});
  }
  j["unmatched_orderings"] = unmatched;

  ordered_json mixed;
  mixed["applicable"] = r.mixed.applicable;
  if (!r.mixed.note.empty()) mixed["note"] = r.mixed.note;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.mixed.rows) {
    rows.push_back({{"label", row.label},
                    {"coefficients", row.coefficients},
                    {"constant", row.constant},
                    {"sense", to_string(row.sense)}});
  }
  mixed["rows"] = rows;
  if (r.mixed.implied_probability) mixed["implied_probability"] = *r.mixed.implied_probability;
  j["mixed_ne"] = mixed;

  j["estimate"] = r.estimate ? ordered_json(r.estimate->data()) : ordered_json(nullptr);
  j["max_violation"] = r.max_violation;
  j["violated_families"] = r.violated_families;
  if (r.round_trip) {
    j["round_trip"] = {{"distribution", r.round_trip->distribution.values()},
                       {"linf", r.round_trip->linf},
                       {"matches", r.round_trip->matches}};
  }
  return j;
}

}  // namespace ceqlab

#endif  // CEQLAB_ESTIMATION_HPP_
