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

#ifndef CEQLAB_ENVIRONMENT_HPP_
#define CEQLAB_ENVIRONMENT_HPP_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "ceqlab/distribution.hpp"
#include "ceqlab/errors.hpp"
#include "ceqlab/rng.hpp"
#include "ceqlab/sampling.hpp"

namespace ceqlab {

// Row-major M x N container.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// Per-component step on the first H-1 probabilities, each -theta, 0 or +theta.
struct ActionSpec {
  std::vector<double> deltas;
};

inline void check_step_size(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw PreconditionError("step size must lie in (0, 1], got " + std::to_string(theta));
  }
}

// All 3^(H-1) actions in ternary counting order with the first component as
// the most significant digit and digits ordered -theta < 0 < +theta.
inline std::vector<ActionSpec> enumerate_actions(std::size_t h, double theta) {
  if (h < 2) throw PreconditionError("need at least two decision sets");
  check_step_size(theta);
  const std::size_t width = h - 1;
  std::size_t count = 1;
  for (std::size_t k = 0; k < width; ++k) count *= 3;
  std::vector<ActionSpec> actions(count);
  for (std::size_t j = 0; j < count; ++j) {
    actions[j].deltas.resize(width);
    std::size_t code = j;
    for (std::size_t k = width; k-- > 0;) {
      actions[j].deltas[k] = (static_cast<double>(code % 3) - 1.0) * theta;
      code /= 3;
    }
  }
  return actions;
}

// Index of the all-zero action.
inline std::size_t identity_action_index(std::size_t num_actions) {
  return num_actions / 2;
}

// Adds the deltas to the first H-1 probabilities, clamps each to [0, 1] and
// sets the last one to the remainder. When the remainder would go negative
// the increases are scaled back proportionally until it is exactly zero.
inline JointDistribution apply_action(const JointDistribution& state,
                                      const ActionSpec& action) {
  const std::size_t h = state.size();
  if (action.deltas.size() + 1 != h) {
    throw InvalidArgumentError("apply_action: action width does not match state");
  }
  std::vector<double> next(h);
  double increase = 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < h; ++k) {
    next[k] = std::clamp(state[k] + action.deltas[k], 0.0, 1.0);
    if (next[k] > state[k]) increase += next[k] - state[k];
    sum += next[k];
  }
  double rest = 1.0 - sum;
  if (rest < 0.0) {
    const double keep = increase > 0.0 ? std::max(0.0, 1.0 - (-rest) / increase) : 0.0;
    sum = 0.0;
    for (std::size_t k = 0; k + 1 < h; ++k) {
      if (next[k] > state[k]) next[k] = state[k] + (next[k] - state[k]) * keep;
      sum += next[k];
    }
    rest = 1.0 - sum;
  }
  next[h - 1] = std::clamp(rest, 0.0, 1.0);
  return JointDistribution(std::move(next));
}

// Smallest admissible number of states per round, ceil(1/theta).
inline std::size_t min_steps(double theta) {
  check_step_size(theta);
  return static_cast<std::size_t>(std::ceil(1.0 / theta - 1e-9));
}

// One player's M rounds: choices[m][n] is the action taken at state n, which
// leads to state n+1. states[m][0] is the start state.
struct EpisodeBatch {
  std::size_t num_actions = 0;
  Grid<std::size_t> choices;
  Grid<JointDistribution> states;

  std::size_t rounds() const { return states.rows(); }
  std::size_t steps() const { return states.cols(); }

  std::vector<double> one_hot(std::size_t m, std::size_t n) const {
    std::vector<double> y(num_actions, 0.0);
    y[choices(m, n)] = 1.0;
    return y;
  }
};

template <typename P>
concept StatePolicy = requires(const P& p, const JointDistribution& s) {
  { p(s, s) } -> std::convertible_to<std::vector<double>>;
};

struct RolloutSpec {
  std::size_t rounds = 1;
  std::size_t steps = 2;
  double theta = 0.005;
  JointDistribution start;
  // Round m draws from derive_stream({seed, epoch, player, m}).
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  std::uint64_t player = 0;
  unsigned threads = 1;
};

// Plays M independent rounds of N states each. The policy sees
// (current, previous) with the start state standing in for the previous
// state at the first step. Rounds may run on separate threads; the result
// does not depend on the thread count.
template <StatePolicy P>
EpisodeBatch rollout(const P& policy, const std::vector<ActionSpec>& actions,
                     const RolloutSpec& spec) {
  if (spec.rounds < 1) throw PreconditionError("rollout needs at least one round");
  if (spec.steps < min_steps(spec.theta) || spec.steps < 2) {
    throw PreconditionError("steps N=" + std::to_string(spec.steps) +
                            " must be at least ceil(1/theta)=" +
                            std::to_string(min_steps(spec.theta)));
  }
  if (actions.empty() || actions.front().deltas.size() + 1 != spec.start.size()) {
    throw InvalidArgumentError("rollout: action set does not match start state");
  }
  EpisodeBatch batch;
  batch.num_actions = actions.size();
  batch.choices = Grid<std::size_t>(spec.rounds, spec.steps - 1, 0);
  batch.states = Grid<JointDistribution>(spec.rounds, spec.steps, spec.start);

  auto play_round = [&](std::size_t m) {
    Rng rng = derive_stream({spec.seed, spec.epoch, spec.player, m});
    for (std::size_t n = 0; n + 1 < spec.steps; ++n) {
      const JointDistribution& cur = batch.states(m, n);
      const JointDistribution& prev = n == 0 ? spec.start : batch.states(m, n - 1);
      const std::vector<double> probs = policy(cur, prev);
      const std::size_t a = sample_action(probs, rng);
      batch.choices(m, n) = a;
      batch.states(m, n + 1) = apply_action(cur, actions[a]);
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(spec.rounds)));
  if (workers == 1) {
    for (std::size_t m = 0; m < spec.rounds; ++m) play_round(m);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t m = w; m < spec.rounds; m += workers) play_round(m);
      });
    }
  }
  return batch;
}

// Element-wise midpoint of the two players' trajectories.
inline Grid<JointDistribution> average_states(const EpisodeBatch& a, const EpisodeBatch& b) {
  if (a.rounds() != b.rounds() || a.steps() != b.steps()) {
    throw InvalidArgumentError("average_states: batch shapes differ");
  }
  Grid<JointDistribution> out(a.rounds(), a.steps());
  for (std::size_t m = 0; m < a.rounds(); ++m) {
    for (std::size_t n = 0; n < a.steps(); ++n) {
      const auto& x = a.states(m, n);
      const auto& y = b.states(m, n);
      if (x.size() != y.size()) throw InvalidArgumentError("average_states: H differs");
      std::vector<double> mid(x.size());
      for (std::size_t k = 0; k < x.size(); ++k) mid[k] = 0.5 * (x[k] + y[k]);
      out(m, n) = JointDistribution::from_approximate(std::move(mid), 1e-12);
    }
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// round,step,action_index,rho_1..rho_H; action_index is empty on the last
// state of a round.
inline void write_batch_csv(std::ostream& os, const EpisodeBatch& batch) {
  const std::size_t h = batch.states(0, 0).size();
  os << "round,step,action_index";
  for (std::size_t k = 1; k <= h; ++k) os << ",rho_" << k;
  os << '\n';
  for (std::size_t m = 0; m < batch.rounds(); ++m) {
    for (std::size_t n = 0; n < batch.steps(); ++n) {
      os << m << ',' << n << ',';
      if (n + 1 < batch.steps()) os << batch.choices(m, n);
      for (double p : batch.states(m, n).probs()) os << ',' << format_double(p);
      os << '\n';
    }
  }
}

}  // namespace ceqlab

#endif  // CEQLAB_ENVIRONMENT_HPP_
