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

#ifndef CEQLAB_DISTRIBUTION_HPP_
#define CEQLAB_DISTRIBUTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ceqlab/errors.hpp"

namespace ceqlab {

// A point on the probability simplex over the H decision sets.
class JointDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  JointDistribution() = default;

  // Checks entries in [0, 1] and unit sum to kSumTolerance.
  explicit JointDistribution(std::vector<double> probs)
      : probs_(std::move(probs)) {
    if (probs_.empty()) {
      throw InvalidArgumentError("distribution must be non-empty");
    }
    double sum = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw InvalidArgumentError("distribution entry outside [0, 1]: " +
                                   std::to_string(p));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance * static_cast<double>(size())) {
      throw InvalidArgumentError("distribution does not sum to 1 (sum=" +
                                 std::to_string(sum) + ")");
    }
  }

  static JointDistribution uniform(std::size_t h) {
    if (h == 0) throw InvalidArgumentError("distribution must be non-empty");
    return JointDistribution(std::vector<double>(h, 1.0 / static_cast<double>(h)));
  }

  static JointDistribution point_mass(std::size_t h, std::size_t at) {
    std::vector<double> p(h, 0.0);
    p.at(at) = 1.0;
    return JointDistribution(std::move(p));
  }

  // Accepts solver or file output: clips entries within `tolerance` of the
  // box and rescales a sum that is within `tolerance` of one.
  static JointDistribution from_approximate(std::vector<double> values,
                                            double tolerance = 1e-6) {
    double sum = 0.0;
    for (double& v : values) {
      if (!std::isfinite(v) || v < -tolerance || v > 1.0 + tolerance) {
        throw InvalidArgumentError("distribution entry outside [0, 1]: " +
                                   std::to_string(v));
      }
      v = std::clamp(v, 0.0, 1.0);
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw InvalidArgumentError("distribution does not sum to 1 (sum=" +
                                 std::to_string(sum) + ")");
    }
    for (double& v : values) v /= sum;
    return JointDistribution(std::move(values));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t h) const { return probs_[h]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& values() const { return probs_; }

  friend bool operator==(const JointDistribution&,
                         const JointDistribution&) = default;

 private:
  std::vector<double> probs_;
};

inline double linf_distance(std::span<const double> a,
                            std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgumentError("linf_distance: size mismatch");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d;
}

}  // namespace ceqlab

#endif  // CEQLAB_DISTRIBUTION_HPP_
