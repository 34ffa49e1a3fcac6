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

#ifndef CEQLAB_VALIDATION_HPP_
#define CEQLAB_VALIDATION_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ceqlab/equilibrium.hpp"
#include "ceqlab/game.hpp"

namespace ceqlab {

struct ValidationReport {
  std::vector<std::string> normalization_violations;
  std::vector<std::string> restriction_violations;
  std::vector<std::string> unknown_payoffs;
  // Equilibrium count of the two-player view; set only for two-player games
  // with both payoffs known.
  std::optional<std::size_t> nash_count;

  bool normalization_ok() const { return normalization_violations.empty(); }
  bool restriction_ok() const { return restriction_violations.empty(); }
  bool has_two_nash() const { return nash_count.has_value() && *nash_count >= 2; }
};

// Reports every finding rather than stopping at the first one.
inline ValidationReport validate_game(const NormalFormGame& game) {
  ValidationReport report;
  const std::size_t n = game.num_players();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& id = game.player_id(i);
    if (!game.has_payoff(i)) {
      report.unknown_payoffs.push_back(id);
      continue;
    }
    const PayoffVector& v = game.payoff(i);
    for (const auto& issue : v.normalization_issues()) {
      report.normalization_violations.push_back(id + ": " + issue);
    }
    // With every other player's decision fixed, player i's values across its
    // own decisions must be pairwise distinct.
    for (std::size_t cell = 0; cell < game.num_decision_sets(); ++cell) {
      auto prof = game.profile(cell);
      if (prof[i] != 0) continue;
      for (std::size_t a = 0; a < game.menu(i).size(); ++a) {
        for (std::size_t b = a + 1; b < game.menu(i).size(); ++b) {
          prof[i] = a;
          const std::size_t ca = game.cell_index(prof);
          prof[i] = b;
          const std::size_t cb = game.cell_index(prof);
          if (v[ca] == v[cb]) {
            report.restriction_violations.push_back(
                id + ": v[" + std::to_string(ca + 1) + "] == v[" +
                std::to_string(cb + 1) + "]");
          }
        }
      }
    }
  }
  if (n == 2 && report.unknown_payoffs.empty()) {
    Bimatrix g = to_bimatrix(game);
    report.nash_count = report.restriction_ok() ? nash_equilibria(g).size()
                                                : pure_ne_enumerate(g).size();
  }
  return report;
}

}  // namespace ceqlab

#endif  // CEQLAB_VALIDATION_HPP_
