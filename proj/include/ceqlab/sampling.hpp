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

#ifndef CEQLAB_SAMPLING_HPP_
#define CEQLAB_SAMPLING_HPP_

#include <cstddef>
#include <span>

#include "ceqlab/rng.hpp"

namespace ceqlab {

// Inverse-CDF draw over the canonical action order. Consumes exactly one
// 64-bit word from `rng`.
inline std::size_t sample_action(std::span<const double> distribution, Rng& rng) {
  const double u = uniform01(rng);
  double cdf = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < distribution.size(); ++j) {
    if (distribution[j] > 0.0) last_positive = j;
    cdf += distribution[j];
    if (u < cdf) return j;
  }
  // Rounding left the total slightly below one.
  return last_positive;
}

}  // namespace ceqlab

#endif  // CEQLAB_SAMPLING_HPP_
