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

#ifndef CEQLAB_GAME_HPP_
#define CEQLAB_GAME_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ceqlab/distribution.hpp"
#include "ceqlab/errors.hpp"

namespace ceqlab {

inline constexpr double kNormalizationTolerance = 1e-9;
inline constexpr double kRenormalizeTolerance = 1e-6;

// One joint outcome D_h: a decision label per player, player 1 first.
struct DecisionSet {
  std::size_t index = 0;
  std::vector<std::string> labels;
};

// Normalized utilities v_h over the decision sets of a game.
//
// The type itself does not enforce normalization so that malformed inputs
// can still be reported by validate_game(); use normalized() at ingestion.
class PayoffVector {
 public:
  PayoffVector() = default;
  explicit PayoffVector(std::vector<double> values) : values_(std::move(values)) {}

  // Accepts values whose sum is within kRenormalizeTolerance of one and
  // rescales them; `renormalized` reports whether the sum was off by more
  // than kNormalizationTolerance.
  static PayoffVector normalized(std::vector<double> values,
                                 bool* renormalized = nullptr) {
    double sum = 0.0;
    for (double v : values) {
      if (!std::isfinite(v)) throw InputError("payoff entry is not finite");
      if (v < 0.0) {
        throw InputError("payoff entry is negative: " + std::to_string(v));
      }
      sum += v;
    }
    const double off = std::abs(sum - 1.0);
    if (off > kRenormalizeTolerance) {
      throw InputError("payoff vector sums to " + std::to_string(sum) +
                       ", expected 1");
    }
    if (renormalized != nullptr) *renormalized = off > kNormalizationTolerance;
    for (double& v : values) v /= sum;
    return PayoffVector(std::move(values));
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t h) const { return values_[h]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

  // Non-negativity and unit sum; empty when normalized.
  std::vector<std::string> normalization_issues() const {
    std::vector<std::string> issues;
    double sum = 0.0;
    for (std::size_t h = 0; h < values_.size(); ++h) {
      if (!std::isfinite(values_[h]) || values_[h] < 0.0) {
        issues.push_back("entry " + std::to_string(h) + " is negative (" +
                         std::to_string(values_[h]) + ")");
      }
      sum += values_[h];
    }
    if (std::abs(sum - 1.0) > kNormalizationTolerance) {
      issues.push_back("entries sum to " + std::to_string(sum));
    }
    return issues;
  }

  friend bool operator==(const PayoffVector&, const PayoffVector&) = default;

 private:
  std::vector<double> values_;
};

// Cells of a two-player view: player a picks the row, player b the column,
// every other player's decision fixed. cells[r * cols + c] is the index of
// the corresponding decision set in the full game.
struct ViewCells {
  std::size_t player_a = 0;
  std::size_t player_b = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> fixed;  // per player; ignored for a and b
  std::vector<std::size_t> cells;
};

// A finite normal-form game. Decision sets enumerate the Cartesian product
// of the player menus row-major with player 1 outermost. Immutable.
class NormalFormGame {
 public:
  NormalFormGame(std::vector<std::string> players,
                 std::vector<std::vector<std::string>> menus,
                 std::map<std::string, PayoffVector> payoffs = {})
      : players_(std::move(players)),
        menus_(std::move(menus)),
        payoffs_(std::move(payoffs)) {
    if (players_.size() < 2) {
      throw InvalidArgumentError("a game needs at least two players");
    }
    if (menus_.size() != players_.size()) {
      throw InvalidArgumentError("one decision menu per player required");
    }
    for (std::size_t i = 0; i < players_.size(); ++i) {
      if (menus_[i].empty()) {
        throw InvalidArgumentError("player " + players_[i] +
                                   " has no decisions");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (players_[i] == players_[j]) {
          throw InvalidArgumentError("duplicate player id " + players_[i]);
        }
      }
    }
    std::size_t h = 1;
    for (const auto& menu : menus_) h *= menu.size();
    decision_sets_.reserve(h);
    for (std::size_t idx = 0; idx < h; ++idx) {
      DecisionSet ds{idx, {}};
      for (std::size_t i = 0; i < players_.size(); ++i) {
        ds.labels.push_back(menus_[i][profile(idx)[i]]);
      }
      decision_sets_.push_back(std::move(ds));
    }
    for (const auto& [id, vec] : payoffs_) {
      player_index(id);
      if (vec.size() != h) {
        throw InvalidArgumentError("payoff vector of " + id + " has length " +
                                   std::to_string(vec.size()) + ", expected " +
                                   std::to_string(h));
      }
    }
  }

  std::size_t num_players() const { return players_.size(); }
  const std::vector<std::string>& players() const { return players_; }
  const std::string& player_id(std::size_t i) const { return players_.at(i); }
  const std::vector<std::string>& menu(std::size_t i) const { return menus_.at(i); }
  const std::vector<std::vector<std::string>>& menus() const { return menus_; }
  std::size_t num_decision_sets() const { return decision_sets_.size(); }
  const std::vector<DecisionSet>& decision_sets() const { return decision_sets_; }
  const std::map<std::string, PayoffVector>& payoffs() const { return payoffs_; }

  std::size_t player_index(const std::string& id) const {
    auto it = std::find(players_.begin(), players_.end(), id);
    if (it == players_.end()) throw InvalidArgumentError("unknown player " + id);
    return static_cast<std::size_t>(it - players_.begin());
  }

  bool has_payoff(std::size_t i) const { return payoffs_.contains(player_id(i)); }
  const PayoffVector& payoff(std::size_t i) const {
    auto it = payoffs_.find(player_id(i));
    if (it == payoffs_.end()) {
      throw PreconditionError("unknown payoff for player " + player_id(i));
    }
    return it->second;
  }

  NormalFormGame with_payoff(const std::string& id, PayoffVector v) const {
    auto payoffs = payoffs_;
    payoffs[id] = std::move(v);
    return NormalFormGame(players_, menus_, std::move(payoffs));
  }

  // Per-player decision indices of decision set `cell`.
  std::vector<std::size_t> profile(std::size_t cell) const {
    std::vector<std::size_t> out(players_.size());
    for (std::size_t i = players_.size(); i-- > 0;) {
      out[i] = cell % menus_[i].size();
      cell /= menus_[i].size();
    }
    return out;
  }

  std::size_t cell_index(std::span<const std::size_t> profile) const {
    if (profile.size() != players_.size()) {
      throw InvalidArgumentError("profile length mismatch");
    }
    std::size_t idx = 0;
    for (std::size_t i = 0; i < players_.size(); ++i) {
      if (profile[i] >= menus_[i].size()) {
        throw InvalidArgumentError("decision index out of range");
      }
      idx = idx * menus_[i].size() + profile[i];
    }
    return idx;
  }

  ViewCells view_cells(std::size_t a, std::size_t b,
                       std::vector<std::size_t> fixed) const {
    if (a == b || a >= num_players() || b >= num_players()) {
      throw InvalidArgumentError("view needs two distinct players");
    }
    fixed.resize(num_players(), 0);
    ViewCells view{a, b, menus_[a].size(), menus_[b].size(), fixed, {}};
    std::vector<std::size_t> prof = fixed;
    for (std::size_t r = 0; r < view.rows; ++r) {
      for (std::size_t c = 0; c < view.cols; ++c) {
        prof[a] = r;
        prof[b] = c;
        view.cells.push_back(cell_index(prof));
      }
    }
    return view;
  }

 private:
  std::vector<std::string> players_;
  std::vector<std::vector<std::string>> menus_;
  std::vector<DecisionSet> decision_sets_;
  std::map<std::string, PayoffVector> payoffs_;
};

// Two-player payoff tables over rows x cols cells, row-major.
struct Bimatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> row_payoff;
  std::vector<double> col_payoff;

  Bimatrix() = default;
  Bimatrix(std::size_t r, std::size_t c, std::vector<double> row,
           std::vector<double> col)
      : rows(r), cols(c), row_payoff(std::move(row)), col_payoff(std::move(col)) {
    if (rows == 0 || cols == 0 || row_payoff.size() != rows * cols ||
        col_payoff.size() != rows * cols) {
      throw InvalidArgumentError("bimatrix payoff size mismatch");
    }
  }

  std::size_t cells() const { return rows * cols; }
  std::size_t cell(std::size_t r, std::size_t c) const { return r * cols + c; }
  double u_row(std::size_t r, std::size_t c) const { return row_payoff[cell(r, c)]; }
  double u_col(std::size_t r, std::size_t c) const { return col_payoff[cell(r, c)]; }
};

// Restriction of `v` to the view's cells, rescaled to unit sum (a zero
// restriction is returned unscaled).
inline std::vector<double> restrict_payoff(const PayoffVector& v,
                                           const ViewCells& view) {
  std::vector<double> out;
  out.reserve(view.cells.size());
  double sum = 0.0;
  for (std::size_t c : view.cells) {
    out.push_back(v[c]);
    sum += v[c];
  }
  if (sum > 0.0) {
    for (double& x : out) x /= sum;
  }
  return out;
}

// Requires two players with known payoffs.
inline Bimatrix to_bimatrix(const NormalFormGame& game) {
  if (game.num_players() != 2) {
    throw PreconditionError("two-player game required");
  }
  return Bimatrix(game.menu(0).size(), game.menu(1).size(),
                  game.payoff(0).data(), game.payoff(1).data());
}

// Dot product of a joint distribution with a payoff vector.
inline double expected_reward(const JointDistribution& state,
                              const PayoffVector& payoff) {
  if (state.size() != payoff.size()) {
    throw InvalidArgumentError("expected_reward: state has " +
                               std::to_string(state.size()) +
                               " entries, payoff has " +
                               std::to_string(payoff.size()));
  }
  double r = 0.0;
  for (std::size_t h = 0; h < state.size(); ++h) r += state[h] * payoff[h];
  return r;
}

}  // namespace ceqlab

#endif  // CEQLAB_GAME_HPP_
