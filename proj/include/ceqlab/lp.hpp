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

#ifndef CEQLAB_LP_HPP_
#define CEQLAB_LP_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ceqlab/errors.hpp"

namespace ceqlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct VariableBound {
  double lo = 0.0;
  double hi = kInf;
};

// maximize objective . x  s.t.  ineq_rows x <= ineq_rhs,  eq_rows x = eq_rhs,
// bounds[j].lo <= x_j <= bounds[j].hi.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> ineq_rows;
  std::vector<double> ineq_rhs;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<VariableBound> bounds;

  explicit LinearProgram(std::size_t num_vars = 0)
      : objective(num_vars, 0.0), bounds(num_vars) {}

  std::size_t num_vars() const { return objective.size(); }

  void add_le(std::vector<double> row, double rhs) {
    ineq_rows.push_back(std::move(row));
    ineq_rhs.push_back(rhs);
  }
  void add_ge(std::vector<double> row, double rhs) {
    for (double& a : row) a = -a;
    add_le(std::move(row), -rhs);
  }
  void add_eq(std::vector<double> row, double rhs) {
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(rhs);
  }

  void validate() const {
    const std::size_t n = num_vars();
    if (bounds.size() != n) throw InvalidArgumentError("LP: bounds size mismatch");
    if (ineq_rows.size() != ineq_rhs.size() || eq_rows.size() != eq_rhs.size()) {
      throw InvalidArgumentError("LP: rhs size mismatch");
    }
    for (const auto& r : ineq_rows) {
      if (r.size() != n) throw InvalidArgumentError("LP: inequality row width mismatch");
    }
    for (const auto& r : eq_rows) {
      if (r.size() != n) throw InvalidArgumentError("LP: equality row width mismatch");
    }
    for (const auto& b : bounds) {
      if (std::isnan(b.lo) || std::isnan(b.hi) || b.lo > b.hi) {
        throw InvalidArgumentError("LP: bound with lo > hi");
      }
    }
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
};

namespace lp_internal {

inline constexpr double kPivotEps = 1e-10;
inline constexpr double kPhaseOneEps = 1e-9;
inline constexpr int kMaxIterations = 100000;

// Dense tableau. Column `width` is the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t width)
      : rows_(rows), width_(width), a_(rows * (width + 1), 0.0), basis_(rows, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t width() const { return width_; }
  double& at(std::size_t i, std::size_t j) { return a_[i * (width_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * (width_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, width_); }
  double rhs(std::size_t i) const { return at(i, width_); }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  void pivot(std::size_t r, std::size_t col) {
    const double p = at(r, col);
    for (std::size_t j = 0; j <= width_; ++j) at(r, j) /= p;
    at(r, col) = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= width_; ++j) at(i, j) -= f * at(r, j);
      at(i, col) = 0.0;
      if (std::abs(rhs(i)) < 1e-14) rhs(i) = 0.0;
    }
    basis_[r] = col;
  }

  void drop_row(std::size_t r) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r * (width_ + 1)),
             a_.begin() + static_cast<std::ptrdiff_t>((r + 1) * (width_ + 1)));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t width_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { kOptimal, kUnbounded };

// Primal simplex with Bland's rule: lowest-index improving column enters;
// among minimum-ratio rows the one whose basic variable has the lowest index
// leaves.
inline PhaseResult run_simplex(Tableau& t, const std::vector<double>& cost,
                               const std::vector<bool>& allowed) {
  const std::size_t n = t.width();
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    std::size_t entering = n;
    for (std::size_t j = 0; j < n && entering == n; ++j) {
      if (!allowed[j]) continue;
      double reduced = cost[j];
      for (std::size_t i = 0; i < t.rows(); ++i) {
        reduced -= cost[t.basis()[i]] * t.at(i, j);
      }
      if (reduced > kPivotEps) entering = j;
    }
    if (entering == n) return PhaseResult::kOptimal;

    std::size_t leaving = t.rows();
    double best = kInf;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double a = t.at(i, entering);
      if (a <= kPivotEps) continue;
      const double ratio = std::max(t.rhs(i), 0.0) / a;
      if (ratio < best - 1e-13 ||
          (std::abs(ratio - best) <= 1e-13 && t.basis()[i] < t.basis()[leaving])) {
        best = std::min(best, ratio);
        leaving = i;
      }
    }
    if (leaving == t.rows()) return PhaseResult::kUnbounded;
    t.pivot(leaving, entering);
  }
  throw InternalError("simplex iteration limit reached");
}

}  // namespace lp_internal

// Two-phase dense primal simplex. Deterministic: identical input bits give
// identical output bits. Infeasible and unbounded problems are reported
// through the status, never thrown.
inline LpSolution solve_lp(const LinearProgram& lp) {
  using namespace lp_internal;
  lp.validate();
  const std::size_t n = lp.num_vars();

  // x_j = offset_j + sum_k coef * y_k with y >= 0.
  struct Term {
    std::size_t y;
    double coef;
  };
  std::vector<double> offset(n, 0.0);
  std::vector<std::vector<Term>> terms(n);
  std::size_t ny = 0;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;
  std::vector<std::pair<std::size_t, double>> upper;  // y_k <= value
  for (std::size_t j = 0; j < n; ++j) {
    const auto& b = lp.bounds[j];
    if (std::isfinite(b.lo)) {
      offset[j] = b.lo;
      terms[j].push_back({ny, 1.0});
      if (std::isfinite(b.hi)) upper.emplace_back(ny, b.hi - b.lo);
      ++ny;
    } else if (std::isfinite(b.hi)) {
      offset[j] = b.hi;
      terms[j].push_back({ny++, -1.0});
    } else {
      terms[j].push_back({ny++, 1.0});
      terms[j].push_back({ny++, -1.0});
    }
  }

  auto transform = [&](const std::vector<double>& row, double rhs,
                       std::vector<double>& out) {
    out.assign(ny, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] == 0.0) continue;
      rhs -= row[j] * offset[j];
      for (const Term& t : terms[j]) out[t.y] += row[j] * t.coef;
    }
    return rhs;
  };

  struct StdRow {
    std::vector<double> a;
    double b;
    bool equality;
  };
  std::vector<StdRow> std_rows;
  for (std::size_t i = 0; i < lp.ineq_rows.size(); ++i) {
    StdRow r{{}, 0.0, false};
    r.b = transform(lp.ineq_rows[i], lp.ineq_rhs[i], r.a);
    std_rows.push_back(std::move(r));
  }
  for (const auto& [k, value] : upper) {
    StdRow r{std::vector<double>(ny, 0.0), value, false};
    r.a[k] = 1.0;
    std_rows.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < lp.eq_rows.size(); ++i) {
    StdRow r{{}, 0.0, true};
    r.b = transform(lp.eq_rows[i], lp.eq_rhs[i], r.a);
    std_rows.push_back(std::move(r));
  }

  const std::size_t m = std_rows.size();
  std::size_t num_slack = 0;
  std::size_t num_art = 0;
  for (const auto& r : std_rows) {
    if (!r.equality) ++num_slack;
    if (r.equality || r.b < 0.0) ++num_art;
  }
  const std::size_t slack0 = ny;
  const std::size_t art0 = ny + num_slack;
  const std::size_t width = art0 + num_art;

  Tableau t(m, width);
  std::size_t s = 0;
  std::size_t art = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = std_rows[i];
    const double sign = r.b < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < ny; ++k) t.at(i, k) = sign * r.a[k];
    t.rhs(i) = sign * r.b;
    if (!r.equality) {
      t.at(i, slack0 + s) = sign;
      if (sign > 0.0) t.basis()[i] = slack0 + s;
      ++s;
    }
    if (r.equality || sign < 0.0) {
      t.at(i, art0 + art) = 1.0;
      t.basis()[i] = art0 + art;
      ++art;
    }
  }

  std::vector<bool> allowed(width, true);
  if (num_art > 0) {
    std::vector<double> phase1(width, 0.0);
    for (std::size_t j = art0; j < width; ++j) phase1[j] = -1.0;
    run_simplex(t, phase1, allowed);
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (t.basis()[i] >= art0) infeasibility += std::max(t.rhs(i), 0.0);
    }
    if (infeasibility > kPhaseOneEps) return LpSolution{LpStatus::kInfeasible, {}, 0.0};
    // Drive zero-valued artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < t.rows();) {
      if (t.basis()[i] < art0) {
        ++i;
        continue;
      }
      std::size_t col = art0;
      for (std::size_t j = 0; j < art0; ++j) {
        if (std::abs(t.at(i, j)) > kPivotEps) {
          col = j;
          break;
        }
      }
      if (col == art0) {
        t.drop_row(i);
      } else {
        t.pivot(i, col);
        ++i;
      }
    }
    for (std::size_t j = art0; j < width; ++j) allowed[j] = false;
  }

  std::vector<double> cost(width, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (const Term& term : terms[j]) cost[term.y] += lp.objective[j] * term.coef;
  }
  if (run_simplex(t, cost, allowed) == PhaseResult::kUnbounded) {
    return LpSolution{LpStatus::kUnbounded, {}, 0.0};
  }

  std::vector<double> y(width, 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) y[t.basis()[i]] = std::max(t.rhs(i), 0.0);
  LpSolution sol{LpStatus::kOptimal, std::vector<double>(n, 0.0), 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    double x = offset[j];
    for (const Term& term : terms[j]) x += term.coef * y[term.y];
    sol.x[j] = x;
    sol.objective += lp.objective[j] * x;
  }
  return sol;
}

}  // namespace ceqlab

#endif  // CEQLAB_LP_HPP_
