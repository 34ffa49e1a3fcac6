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

#ifndef CEQLAB_TRAINING_HPP_
#define CEQLAB_TRAINING_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ceqlab/adam.hpp"
#include "ceqlab/distribution.hpp"
#include "ceqlab/environment.hpp"
#include "ceqlab/errors.hpp"
#include "ceqlab/game.hpp"
#include "ceqlab/policy_net.hpp"
#include "json.hpp"

namespace ceqlab {

inline constexpr double kStdGuard = 1e-8;

// Per-(round, step) rewards of one player: the raw expected reward of the
// averaged state, its discounted value gamma^(N-1-n) * raw, and the
// discounted value standardized per step across rounds.
struct RewardTensor {
  Grid<double> raw;
  Grid<double> discounted;
  Grid<double> standardized;
};

// (x - mean) / sd with the population sd; all zeros when sd <= guard.
inline void standardize_in_place(std::vector<double>& column, double guard = kStdGuard) {
  if (column.empty()) return;
  const double count = static_cast<double>(column.size());
  double mean = 0.0;
  for (double x : column) mean += x;
  mean /= count;
  double var = 0.0;
  for (double x : column) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / count);
  for (double& x : column) x = sd > guard ? (x - mean) / sd : 0.0;
}

inline RewardTensor shape_rewards(const Grid<JointDistribution>& avg_states,
                                  const PayoffVector& payoff, double gamma,
                                  double guard = kStdGuard) {
  const std::size_t rounds = avg_states.rows();
  const std::size_t steps = avg_states.cols();
  if (rounds < 2) throw PreconditionError("reward standardization needs at least two rounds");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw PreconditionError("discount must lie in [0, 1]");
  RewardTensor r{Grid<double>(rounds, steps), Grid<double>(rounds, steps),
                 Grid<double>(rounds, steps)};
  for (std::size_t n = 0; n < steps; ++n) {
    const double discount = std::pow(gamma, static_cast<double>(steps - 1 - n));
    for (std::size_t m = 0; m < rounds; ++m) {
      r.raw(m, n) = expected_reward(avg_states(m, n), payoff);
      r.discounted(m, n) = discount * r.raw(m, n);
    }
    std::vector<double> column(rounds);
    for (std::size_t m = 0; m < rounds; ++m) column[m] = r.discounted(m, n);
    standardize_in_place(column, guard);
    for (std::size_t m = 0; m < rounds; ++m) r.standardized(m, n) = column[m];
  }
  return r;
}

// Which standardized reward weights the choice made at state n.
enum class RewardAlignment {
  // The reward of state n+1, the state the choice produced.
  kResultingState,
  // The reward of state n itself.
  kSameIndex,
};

inline const char* to_string(RewardAlignment a) {
  return a == RewardAlignment::kResultingState ? "resulting_state" : "same_index";
}

struct TrainingConfig {
  std::size_t rounds = 40;
  std::size_t steps = 200;
  double theta = 0.005;
  double gamma = 0.99;
  double learning_rate = 0.001;
  std::size_t max_epochs = 300;
  std::size_t stability_window = 10;
  // Non-positive means 2 * theta.
  double stability_tolerance = 0.0;
  std::size_t analyzer_width = 64;
  std::size_t mid_width = 128;
  LossForm loss = LossForm::kTwoSided;
  RewardAlignment alignment = RewardAlignment::kResultingState;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  static TrainingConfig full_scale() { return TrainingConfig{}; }

  static TrainingConfig desk_scale() {
    TrainingConfig c;
    c.rounds = 16;
    c.steps = 60;
    c.theta = 0.02;
    c.analyzer_width = 8;
    c.mid_width = 16;
    return c;
  }

  double tolerance() const { return stability_tolerance > 0.0 ? stability_tolerance : 2.0 * theta; }

  void validate() const {
    check_step_size(theta);
    if (steps < min_steps(theta)) {
      throw PreconditionError("steps N=" + std::to_string(steps) +
                              " must be at least ceil(1/theta)=" +
                              std::to_string(min_steps(theta)));
    }
    if (rounds < 2) throw PreconditionError("rounds M must be at least 2");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw PreconditionError("gamma must lie in [0, 1]");
    if (!(learning_rate > 0.0)) throw PreconditionError("learning rate must be positive");
    if (stability_window < 1) throw PreconditionError("stability window must be positive");
    if (analyzer_width == 0 || mid_width == 0) throw PreconditionError("widths must be positive");
  }
};

inline nlohmann::json to_json(const TrainingConfig& c) {
  return {{"rounds", c.rounds},
          {"steps", c.steps},
          {"theta", c.theta},
          {"gamma", c.gamma},
          {"learning_rate", c.learning_rate},
          {"max_epochs", c.max_epochs},
          {"stability_window", c.stability_window},
          {"stability_tolerance", c.tolerance()},
          {"analyzer_width", c.analyzer_width},
          {"mid_width", c.mid_width},
          {"loss", to_string(c.loss)},
          {"reward_alignment", to_string(c.alignment)},
          {"seed", c.seed},
          {"threads", c.threads}};
}

struct UpdateStats {
  double loss = 0.0;
  std::size_t samples = 0;
};

// Sums the weighted log loss over every recorded choice (target: the one-hot
// choice, weight: its standardized reward) and applies one Adam step.
inline UpdateStats update_policy(PolicyNetwork& net, AdamOptimizer& optimizer,
                                 const EpisodeBatch& batch, const RewardTensor& rewards,
                                 LossForm form = LossForm::kTwoSided,
                                 RewardAlignment alignment = RewardAlignment::kResultingState) {
  if (rewards.standardized.rows() != batch.rounds() ||
      rewards.standardized.cols() != batch.steps()) {
    throw InvalidArgumentError("update_policy: rewards and batch are not aligned");
  }
  UpdateStats stats;
  NetworkGradients grads = net.zero_gradients();
  for (std::size_t m = 0; m < batch.rounds(); ++m) {
    const JointDistribution& start = batch.states(m, 0);
    for (std::size_t n = 0; n + 1 < batch.steps(); ++n) {
      const double weight = rewards.standardized(
          m, alignment == RewardAlignment::kResultingState ? n + 1 : n);
      const auto& prev = n == 0 ? start : batch.states(m, n - 1);
      const ForwardTrace trace = net.forward(batch.states(m, n), prev);
      const std::vector<double> target = batch.one_hot(m, n);
      stats.loss += weighted_log_loss(trace.output(), target, weight, form);
      accumulate_gradients(net, trace, target, weight, grads, form);
      ++stats.samples;
    }
  }
  if (!std::isfinite(stats.loss)) {
    throw NumericError("non-finite loss after " + std::to_string(stats.samples) +
                       " samples; epoch aborted");
  }
  optimizer.step(net, grads);
  return stats;
}

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t player = 0;  // 0 = main, 1 = opponent
  double mean_terminal_reward = 0.0;
  std::vector<double> terminal_state;  // mean over rounds of the last averaged state
};

struct TrainingResult {
  JointDistribution stable_state;  // mean terminal averaged state of the last epoch
  bool stable = false;
  std::size_t epochs_run = 0;
  std::vector<EpochRecord> history;
  std::array<PolicyNetwork, 2> networks;
};

namespace training_internal {

inline bool window_is_stable(const std::vector<std::vector<double>>& terminal,
                             std::size_t window, double tolerance) {
  if (terminal.size() < window) return false;
  const std::size_t h = terminal.back().size();
  for (std::size_t k = 0; k < h; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t e = terminal.size() - window; e < terminal.size(); ++e) {
      lo = std::min(lo, terminal[e][k]);
      hi = std::max(hi, terminal[e][k]);
    }
    if (hi - lo > tolerance) return false;
  }
  return true;
}

}  // namespace training_internal

// Simultaneous self-play of two policy networks over the shared simplex
// environment. Each player only ever sees its own payoff vector; the two
// are coupled through the averaged states. Stops once the mean terminal
// averaged state has stayed within the tolerance (L-infinity, max - min per
// component) over the last `stability_window` epochs, or at max_epochs.
inline TrainingResult train_pair(const PayoffVector& main_payoff,
                                 const PayoffVector& opponent_payoff,
                                 const TrainingConfig& config) {
  config.validate();
  const std::size_t h = main_payoff.size();
  if (opponent_payoff.size() != h) throw InvalidArgumentError("train_pair: payoff sizes differ");
  const auto actions = enumerate_actions(h, config.theta);
  const NetworkShape shape{h, config.analyzer_width, config.mid_width, actions.size()};
  const std::array<const PayoffVector*, 2> payoffs{&main_payoff, &opponent_payoff};

  TrainingResult result;
  std::array<AdamOptimizer, 2> optimizers;
  for (std::size_t p = 0; p < 2; ++p) {
    Rng seeder = derive_stream({config.seed, p, 0x696e6974ull});
    result.networks[p] = PolicyNetwork::initialize(shape, seeder());
    optimizers[p] = AdamOptimizer(result.networks[p], AdamConfig{config.learning_rate});
  }

  const JointDistribution start = JointDistribution::uniform(h);
  std::vector<std::vector<double>> terminal_means;
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::array<EpisodeBatch, 2> batches;
    for (std::size_t p = 0; p < 2; ++p) {
      const PolicyNetwork& net = result.networks[p];
      auto policy = [&net](const JointDistribution& cur, const JointDistribution& prev) {
        return net.action_probabilities(cur, prev);
      };
      RolloutSpec spec{config.rounds, config.steps, config.theta, start,
                       config.seed,   epoch,        p,            config.threads};
      batches[p] = rollout(policy, actions, spec);
    }
    const Grid<JointDistribution> avg = average_states(batches[0], batches[1]);

    std::vector<double> terminal(h, 0.0);
    for (std::size_t m = 0; m < config.rounds; ++m) {
      for (std::size_t k = 0; k < h; ++k) terminal[k] += avg(m, config.steps - 1)[k];
    }
    for (double& x : terminal) x /= static_cast<double>(config.rounds);

    for (std::size_t p = 0; p < 2; ++p) {
      const RewardTensor rewards = shape_rewards(avg, *payoffs[p], config.gamma);
      double mean_terminal = 0.0;
      for (std::size_t m = 0; m < config.rounds; ++m) {
        mean_terminal += rewards.raw(m, config.steps - 1);
      }
      mean_terminal /= static_cast<double>(config.rounds);
      result.history.push_back({epoch, p, mean_terminal, terminal});
      update_policy(result.networks[p], optimizers[p], batches[p], rewards, config.loss,
                    config.alignment);
    }

    terminal_means.push_back(terminal);
    result.epochs_run = epoch + 1;
    result.stable_state = JointDistribution::from_approximate(terminal, 1e-9);
    if (training_internal::window_is_stable(terminal_means, config.stability_window,
                                            config.tolerance())) {
      result.stable = true;
      break;
    }
  }
  if (result.epochs_run == 0) {
    result.stable_state = start;
  }
  return result;
}

// epoch,player,mean_terminal_reward,rho_1..rho_H with '#'-prefixed header
// lines carrying the resolved configuration.
inline void write_history_csv(std::ostream& os, const TrainingResult& result,
                              const std::array<std::string, 2>& player_ids,
                              const nlohmann::json& header) {
  os << "# " << header.dump() << '\n';
  const std::size_t h = result.history.empty() ? 0 : result.history.front().terminal_state.size();
  os << "epoch,player,mean_terminal_reward";
  for (std::size_t k = 1; k <= h; ++k) os << ",rho_" << k;
  os << '\n';
  for (const EpochRecord& r : result.history) {
    os << r.epoch << ',' << player_ids[r.player] << ',' << format_double(r.mean_terminal_reward);
    for (double x : r.terminal_state) os << ',' << format_double(x);
    os << '\n';
  }
}

}  // namespace ceqlab

#endif  // CEQLAB_TRAINING_HPP_
