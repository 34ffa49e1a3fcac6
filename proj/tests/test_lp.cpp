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

#include <cstring>
#include <random>
#include <vector>

#include "ceqlab/lp.hpp"
#include "gtest/gtest.h"
#include "oracles.hpp"

namespace ceqlab {
namespace {

TEST(SolveLp, SingleBoundedVariable) {
  LinearProgram lp(1);
  lp.objective = {1.0};
  lp.add_le({1.0}, 1.0);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_DOUBLE_EQ(s.x[0], 1.0);
}

TEST(SolveLp, DegenerateOptimumIsDeterministic) {
  LinearProgram lp(2);
  lp.objective = {1.0, 1.0};
  lp.add_le({1.0, 1.0}, 1.0);
  const LpSolution a = solve_lp(lp);
  ASSERT_EQ(a.status, LpStatus::kOptimal);
  EXPECT_DOUBLE_EQ(a.objective, 1.0);
  for (int i = 0; i < 10; ++i) {
    const LpSolution b = solve_lp(lp);
    ASSERT_EQ(b.x.size(), a.x.size());
    EXPECT_EQ(std::memcmp(a.x.data(), b.x.data(), a.x.size() * sizeof(double)), 0);
  }
}

TEST(SolveLp, InfeasibleAndUnboundedAreStatuses) {
  LinearProgram infeasible(1);
  infeasible.objective = {1.0};
  infeasible.add_ge({1.0}, 2.0);
  infeasible.add_le({1.0}, 1.0);
  EXPECT_EQ(solve_lp(infeasible).status, LpStatus::kInfeasible);

  LinearProgram unbounded(2);
  unbounded.objective = {1.0, 0.0};
  unbounded.add_ge({1.0, -1.0}, 0.0);
  EXPECT_EQ(solve_lp(unbounded).status, LpStatus::kUnbounded);
}

TEST(SolveLp, FreeAndShiftedBounds) {
  LinearProgram lp(2);
  lp.objective = {-1.0, 1.0};
  lp.bounds[0] = {-kInf, kInf};
  lp.bounds[1] = {-2.0, 3.0};
  lp.add_eq({1.0, 1.0}, 0.5);
  lp.add_ge({1.0, 0.0}, -4.0);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.x[1], 3.0, 1e-12);
  EXPECT_NEAR(s.x[0], -2.5, 1e-12);
}

TEST(SolveLp, RedundantEqualityRows) {
  LinearProgram lp(3);
  lp.objective = {1.0, 2.0, 3.0};
  lp.add_eq({1.0, 1.0, 1.0}, 1.0);
  lp.add_eq({2.0, 2.0, 2.0}, 2.0);
  lp.add_le({0.0, 0.0, 1.0}, 0.25);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.objective, 0.75 * 2.0 + 0.25 * 3.0, 1e-12);
}

TEST(SolveLp, RejectsMalformedRows) {
  LinearProgram lp(2);
  lp.add_le({1.0}, 1.0);
  EXPECT_THROW(solve_lp(lp), InvalidArgumentError);
}

// Random 2-variable programs in a box against enumeration of all pairwise
// constraint intersections.
TEST(SolveLp, MatchesVertexEnumerationOnRandomPlanarPrograms) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    LinearProgram lp(2);
    lp.objective = {u(rng), u(rng)};
    std::vector<std::vector<double>> rows{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    std::vector<double> rhs{2, 2, 0, 0};
    for (int k = 0; k < 3; ++k) {
      rows.push_back({u(rng), u(rng)});
      rhs.push_back(u(rng) + 1.0);
    }
    for (std::size_t r = 4; r < rows.size(); ++r) lp.add_le(rows[r], rhs[r]);
    lp.bounds[0].hi = 2.0;
    lp.bounds[1].hi = 2.0;

    double best = -kInf;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        auto x = oracle::solve_square({rows[i], rows[j]}, {rhs[i], rhs[j]});
        if (!x) continue;
        bool ok = true;
        for (std::size_t r = 0; r < rows.size(); ++r) {
          if (rows[r][0] * (*x)[0] + rows[r][1] * (*x)[1] > rhs[r] + 1e-9) ok = false;
        }
        if (ok) best = std::max(best, lp.objective[0] * (*x)[0] + lp.objective[1] * (*x)[1]);
      }
    }
    const LpSolution s = solve_lp(lp);
    if (best == -kInf) {
      EXPECT_EQ(s.status, LpStatus::kInfeasible) << trial;
    } else {
      ASSERT_EQ(s.status, LpStatus::kOptimal) << trial;
      EXPECT_NEAR(s.objective, best, 1e-9) << trial;
    }
  }
}

}  // namespace
}  // namespace ceqlab
