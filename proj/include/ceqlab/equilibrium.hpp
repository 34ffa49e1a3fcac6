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

#ifndef CEQLAB_EQUILIBRIUM_HPP_
#define CEQLAB_EQUILIBRIUM_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ceqlab/distribution.hpp"
#include "ceqlab/errors.hpp"
#include "ceqlab/game.hpp"
#include "ceqlab/lp.hpp"

namespace ceqlab {

inline constexpr double kCeTolerance = 1e-9;
inline constexpr double kBestResponseSlack = 1e-12;

// Correlated-equilibrium rows over the cells of a two-player game, in the
// form rows * rho <= 0: for each player and each ordered pair (a, a') of
// its own decisions, sum over opponent decisions of
// rho(a, .) * [u(a, .) - u(a', .)] >= 0. Simplex rows are added separately.
struct CeConstraintRows {
  std::vector<std::vector<double>> deviation_rows;  // as "<= 0" rows
  struct Origin {
    int player;  // 0 = row player, 1 = column player
    std::size_t recommended;
    std::size_t deviation;
  };
  std::vector<Origin> origins;
};

inline CeConstraintRows ce_deviation_rows(const Bimatrix& g) {
  CeConstraintRows out;
  for (std::size_t a = 0; a < g.rows; ++a) {
    for (std::size_t b = 0; b < g.rows; ++b) {
      if (a == b) continue;
      std::vector<double> row(g.cells(), 0.0);
      for (std::size_t c = 0; c < g.cols; ++c) {
        row[g.cell(a, c)] = -(g.u_row(a, c) - g.u_row(b, c));
      }
      out.deviation_rows.push_back(std::move(row));
      out.origins.push_back({0, a, b});
    }
  }
  for (std::size_t a = 0; a < g.cols; ++a) {
    for (std::size_t b = 0; b < g.cols; ++b) {
      if (a == b) continue;
      std::vector<double> row(g.cells(), 0.0);
      for (std::size_t r = 0; r < g.rows; ++r) {
        row[g.cell(r, a)] = -(g.u_col(r, a) - g.u_col(r, b));
      }
      out.deviation_rows.push_back(std::move(row));
      out.origins.push_back({1, a, b});
    }
  }
  return out;
}

// The CE polytope as an LP with a zero objective: deviation rows, one
// equality sum(rho) = 1 and bounds rho >= 0.
inline LinearProgram build_ce_constraints(const Bimatrix& g) {
  LinearProgram lp(g.cells());
  for (auto& row : ce_deviation_rows(g).deviation_rows) lp.add_le(std::move(row), 0.0);
  lp.add_eq(std::vector<double>(g.cells(), 1.0), 1.0);
  return lp;
}

inline LinearProgram build_ce_constraints(const NormalFormGame& game) {
  return build_ce_constraints(to_bimatrix(game));
}

struct CeCheck {
  bool is_ce = false;
  // Largest expected gain of any recommended-decision swap; <= 0 for a CE.
  double max_violation = 0.0;
};

// Exhaustive deviation check, independent of the LP path.
inline CeCheck is_ce(const Bimatrix& g, std::span<const double> rho,
                     double tolerance = kCeTolerance) {
  if (rho.size() != g.cells()) throw InvalidArgumentError("is_ce: size mismatch");
  double worst = -kInf;
  for (std::size_t a = 0; a < g.rows; ++a) {
    for (std::size_t b = 0; b < g.rows; ++b) {
      if (a == b) continue;
      double gain = 0.0;
      for (std::size_t c = 0; c < g.cols; ++c) {
        gain += rho[g.cell(a, c)] * (g.u_row(b, c) - g.u_row(a, c));
      }
      worst = std::max(worst, gain);
    }
  }
  for (std::size_t a = 0; a < g.cols; ++a) {
    for (std::size_t b = 0; b < g.cols; ++b) {
      if (a == b) continue;
      double gain = 0.0;
      for (std::size_t r = 0; r < g.rows; ++r) {
        gain += rho[g.cell(r, a)] * (g.u_col(r, b) - g.u_col(r, a));
      }
      worst = std::max(worst, gain);
    }
  }
  if (worst == -kInf) worst = 0.0;
  return CeCheck{worst <= tolerance, worst};
}

inline double welfare(const Bimatrix& g, std::span<const double> rho) {
  double w = 0.0;
  for (std::size_t h = 0; h < g.cells(); ++h) {
    w += rho[h] * (g.row_payoff[h] + g.col_payoff[h]);
  }
  return w;
}

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded };

struct CESolution {
  SolveStatus status = SolveStatus::kInfeasible;
  JointDistribution distribution;
  double welfare = 0.0;
};

// Welfare-maximizing correlated equilibrium.
inline CESolution ce_solve_max_welfare(const Bimatrix& g) {
  LinearProgram lp = build_ce_constraints(g);
  for (std::size_t h = 0; h < g.cells(); ++h) {
    lp.objective[h] = g.row_payoff[h] + g.col_payoff[h];
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::kInfeasible) {
    // Every Nash equilibrium lies in the CE polytope.
    throw InternalError("CE polytope reported empty");
  }
  if (sol.status == LpStatus::kUnbounded) {
    throw InternalError("CE welfare LP reported unbounded");
  }
  CESolution out;
  out.status = SolveStatus::kOptimal;
  out.distribution = JointDistribution::from_approximate(sol.x, 1e-9);
  out.welfare = welfare(g, out.distribution.probs());
  return out;
}

inline CESolution ce_solve_max_welfare(const NormalFormGame& game) {
  return ce_solve_max_welfare(to_bimatrix(game));
}

enum class NashKind { kPure, kMixed };

inline const char* to_string(NashKind k) {
  return k == NashKind::kPure ? "pure" : "mixed";
}

struct NashEquilibrium {
  NashKind kind = NashKind::kPure;
  std::vector<double> row_strategy;
  std::vector<double> col_strategy;
  double row_payoff = 0.0;
  double col_payoff = 0.0;

  // Product distribution over cells.
  std::vector<double> joint(const Bimatrix& g) const {
    std::vector<double> out(g.cells(), 0.0);
    for (std::size_t r = 0; r < g.rows; ++r) {
      for (std::size_t c = 0; c < g.cols; ++c) {
        out[g.cell(r, c)] = row_strategy[r] * col_strategy[c];
      }
    }
    return out;
  }
};

// Cells that are mutual best responses.
inline std::vector<NashEquilibrium> pure_ne_enumerate(const Bimatrix& g) {
  std::vector<NashEquilibrium> out;
  for (std::size_t r = 0; r < g.rows; ++r) {
    for (std::size_t c = 0; c < g.cols; ++c) {
      bool best = true;
      for (std::size_t r2 = 0; r2 < g.rows && best; ++r2) {
        if (g.u_row(r2, c) > g.u_row(r, c) + kBestResponseSlack) best = false;
      }
      for (std::size_t c2 = 0; c2 < g.cols && best; ++c2) {
        if (g.u_col(r, c2) > g.u_col(r, c) + kBestResponseSlack) best = false;
      }
      if (!best) continue;
      NashEquilibrium ne;
      ne.kind = NashKind::kPure;
      ne.row_strategy.assign(g.rows, 0.0);
      ne.col_strategy.assign(g.cols, 0.0);
      ne.row_strategy[r] = 1.0;
      ne.col_strategy[c] = 1.0;
      ne.row_payoff = g.u_row(r, c);
      ne.col_payoff = g.u_col(r, c);
      out.push_back(std::move(ne));
    }
  }
  return out;
}

// Each player's payoffs differ across its own decisions whenever the
// opponent's decision is fixed (needed for the indifference equations).
inline bool satisfies_unequal_reward_restriction(const Bimatrix& g) {
  for (std::size_t c = 0; c < g.cols; ++c) {
    for (std::size_t r = 0; r < g.rows; ++r) {
      for (std::size_t r2 = r + 1; r2 < g.rows; ++r2) {
        if (g.u_row(r, c) == g.u_row(r2, c)) return false;
      }
    }
  }
  for (std::size_t r = 0; r < g.rows; ++r) {
    for (std::size_t c = 0; c < g.cols; ++c) {
      for (std::size_t c2 = c + 1; c2 < g.cols; ++c2) {
        if (g.u_col(r, c) == g.u_col(r, c2)) return false;
      }
    }
  }
  return true;
}

// Completely mixed equilibrium of a 2x2 game from the two indifference
// equations; absent when either mixing probability falls outside (0, 1).
inline std::optional<NashEquilibrium> mixed_ne_2x2(const Bimatrix& g) {
  if (g.rows != 2 || g.cols != 2) throw PreconditionError("mixed_ne_2x2 needs a 2x2 game");
  if (!satisfies_unequal_reward_restriction(g)) {
    throw PreconditionError("mixed_ne_2x2: unequal-reward restriction violated");
  }
  // p = P(row plays 0) makes the column player indifferent.
  const double col_den = g.u_col(0, 0) - g.u_col(0, 1) - g.u_col(1, 0) + g.u_col(1, 1);
  // q = P(column plays 0) makes the row player indifferent.
  const double row_den = g.u_row(0, 0) - g.u_row(1, 0) - g.u_row(0, 1) + g.u_row(1, 1);
  if (col_den == 0.0 || row_den == 0.0) return std::nullopt;
  const double p = (g.u_col(1, 1) - g.u_col(1, 0)) / col_den;
  const double q = (g.u_row(1, 1) - g.u_row(0, 1)) / row_den;
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) return std::nullopt;
  NashEquilibrium ne;
  ne.kind = NashKind::kMixed;
  ne.row_strategy = {p, 1.0 - p};
  ne.col_strategy = {q, 1.0 - q};
  ne.row_payoff = q * g.u_row(0, 0) + (1.0 - q) * g.u_row(0, 1);
  ne.col_payoff = p * g.u_col(0, 0) + (1.0 - p) * g.u_col(1, 0);
  return ne;
}

// Largest absolute difference between a player's payoffs across decisions
// in the support, against the opponent's mixed strategy.
inline double indifference_residual(const Bimatrix& g, const NashEquilibrium& ne) {
  double res = 0.0;
  auto row_value = [&](std::size_t r) {
    double v = 0.0;
    for (std::size_t c = 0; c < g.cols; ++c) v += ne.col_strategy[c] * g.u_row(r, c);
    return v;
  };
  auto col_value = [&](std::size_t c) {
    double v = 0.0;
    for (std::size_t r = 0; r < g.rows; ++r) v += ne.row_strategy[r] * g.u_col(r, c);
    return v;
  };
  for (std::size_t r = 0; r < g.rows; ++r) {
    if (ne.row_strategy[r] > 0.0) res = std::max(res, std::abs(row_value(r) - ne.row_payoff));
  }
  for (std::size_t c = 0; c < g.cols; ++c) {
    if (ne.col_strategy[c] > 0.0) res = std::max(res, std::abs(col_value(c) - ne.col_payoff));
  }
  return res;
}

// Pure equilibria for any size plus the mixed one for 2x2 views. The mixed
// search is skipped when the unequal-reward restriction fails.
inline std::vector<NashEquilibrium> nash_equilibria(const Bimatrix& g) {
  auto out = pure_ne_enumerate(g);
  if (g.rows == 2 && g.cols == 2 && satisfies_unequal_reward_restriction(g)) {
    if (auto mixed = mixed_ne_2x2(g)) out.push_back(std::move(*mixed));
  }
  return out;
}

// Whether `point` (row payoff, column payoff) is a convex combination of the
// equilibrium payoff pairs.
inline bool ne_hull_contains(const std::vector<NashEquilibrium>& equilibria,
                             std::pair<double, double> point) {
  if (equilibria.empty()) throw PreconditionError("ne_hull_contains: empty NE set");
  const std::size_t k = equilibria.size();
  LinearProgram lp(k);
  std::vector<double> xs(k), ys(k);
  for (std::size_t i = 0; i < k; ++i) {
    xs[i] = equilibria[i].row_payoff;
    ys[i] = equilibria[i].col_payoff;
  }
  lp.add_eq(xs, point.first);
  lp.add_eq(ys, point.second);
  lp.add_eq(std::vector<double>(k, 1.0), 1.0);
  return solve_lp(lp).status == LpStatus::kOptimal;
}

}  // namespace ceqlab

#endif  // CEQLAB_EQUILIBRIUM_HPP_
