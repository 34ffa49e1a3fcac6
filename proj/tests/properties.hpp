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

// Randomized property suites shared by the unit tests and the acceptance
// runner. Each returns a description of the first failure, or nothing.

#ifndef CEQLAB_TESTS_PROPERTIES_HPP_
#define CEQLAB_TESTS_PROPERTIES_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ceqlab/environment.hpp"
#include "ceqlab/rng.hpp"
#include "ceqlab/training.hpp"

namespace ceqlab::properties {

inline JointDistribution RandomSimplexPoint(Rng& rng, std::size_t h) {
  std::vector<double> x(h);
  double s = 0.0;
  for (double& e : x) s += e = -std::log(1.0 - uniform01(rng));
  for (double& e : x) e /= s;
  return JointDistribution::from_approximate(x);
}

inline PayoffVector RandomPayoff(Rng& rng, std::size_t h) {
  return PayoffVector(RandomSimplexPoint(rng, h).values());
}

// Mean 0 and sd 1 per standardized column when sd > guard; gamma = 1 leaves
// the raw rewards; a column of identical states standardizes to zeros.
inline std::optional<std::string> RewardShaping(std::uint64_t seed, int tensors) {
  Rng rng = derive_stream({seed, 0x7368ull});
  for (int t = 0; t < tensors; ++t) {
    const std::size_t h = 2 + t % 4;
    const std::size_t rounds = 2 + t % 9;
    const std::size_t steps = 1 + t % 7;
    const PayoffVector v = RandomPayoff(rng, h);
    Grid<JointDistribution> avg(rounds, steps);
    const std::size_t flat_step = t % 5 == 0 ? 0 : steps;  // identical states in this column
    const JointDistribution shared = RandomSimplexPoint(rng, h);
    for (std::size_t m = 0; m < rounds; ++m) {
      for (std::size_t n = 0; n < steps; ++n) {
        avg(m, n) = n == flat_step ? shared : RandomSimplexPoint(rng, h);
      }
    }
    const double gamma = t % 3 == 0 ? 1.0 : uniform01(rng);
    const RewardTensor r = shape_rewards(avg, v, gamma);
    for (std::size_t n = 0; n < steps; ++n) {
      double mean = 0.0;
      double raw_mean = 0.0;
      for (std::size_t m = 0; m < rounds; ++m) {
        mean += r.discounted(m, n);
        raw_mean += r.raw(m, n);
        if (gamma == 1.0 && r.discounted(m, n) != r.raw(m, n)) {
          return "gamma=1 changed a reward in tensor " + std::to_string(t);
        }
        const double expect = std::pow(gamma, static_cast<double>(steps - 1 - n)) * r.raw(m, n);
        if (r.discounted(m, n) != expect) return "discount mismatch in tensor " + std::to_string(t);
      }
      mean /= static_cast<double>(rounds);
      double var = 0.0;
      for (std::size_t m = 0; m < rounds; ++m) {
        var += (r.discounted(m, n) - mean) * (r.discounted(m, n) - mean);
      }
      const double sd = std::sqrt(var / static_cast<double>(rounds));
      double zmean = 0.0;
      double zvar = 0.0;
      for (std::size_t m = 0; m < rounds; ++m) zmean += r.standardized(m, n);
      zmean /= static_cast<double>(rounds);
      for (std::size_t m = 0; m < rounds; ++m) {
        zvar += (r.standardized(m, n) - zmean) * (r.standardized(m, n) - zmean);
      }
      const double zsd = std::sqrt(zvar / static_cast<double>(rounds));
      if (n == flat_step || sd <= kStdGuard) {
        for (std::size_t m = 0; m < rounds; ++m) {
          if (r.standardized(m, n) != 0.0) {
            return "guarded column not zero in tensor " + std::to_string(t);
          }
        }
        continue;
      }
      if (std::abs(zmean) > 1e-9) return "column mean " + std::to_string(zmean);
      if (std::abs(zsd - 1.0) > 1e-6) return "column sd " + std::to_string(zsd);
    }
  }
  return std::nullopt;
}

// Random action sequences from random states stay on the simplex; the
// all-zero action is the identity.
inline std::optional<std::string> EnvironmentFuzz(std::uint64_t seed, int sequences,
                                                  int length = 25) {
  Rng rng = derive_stream({seed, 0x656eull});
  for (int q = 0; q < sequences; ++q) {
    const std::size_t h = 2 + q % 5;
    const double theta = q % 4 == 0 ? 0.005 : std::max(1e-3, uniform01(rng));
    const auto actions = enumerate_actions(h, theta);
    const ActionSpec& zero = actions[identity_action_index(actions.size())];
    JointDistribution s = q % 6 == 0 ? JointDistribution::point_mass(h, q % h)
                                     : RandomSimplexPoint(rng, h);
    for (int step = 0; step < length; ++step) {
      const std::size_t a = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(actions.size()));
      const JointDistribution next = apply_action(s, actions[a]);
      double sum = 0.0;
      for (std::size_t k = 0; k < h; ++k) {
        if (next[k] < 0.0 || next[k] > 1.0) return "component out of [0,1]";
        if (k + 1 < h && std::abs(next[k] - s[k]) > theta + 1e-12) return "moved more than theta";
        sum += next[k];
      }
      if (std::abs(sum - 1.0) > 1e-12 * static_cast<double>(h)) return "sum off by " + std::to_string(sum - 1.0);
      if (!(apply_action(next, zero) == next)) return "zero action changed the state";
      s = next;
    }
  }
  return std::nullopt;
}

}  // namespace ceqlab::properties

#endif  // CEQLAB_TESTS_PROPERTIES_HPP_
