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

#ifndef CEQLAB_ADAM_HPP_
#define CEQLAB_ADAM_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

#include "ceqlab/errors.hpp"
#include "ceqlab/policy_net.hpp"

namespace ceqlab {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias-corrected moments, one moment pair per parameter.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(const PolicyNetwork& net, AdamConfig config)
      : config_(config), m_(net.zero_gradients()), v_(net.zero_gradients()) {
    if (!(config.learning_rate > 0.0)) {
      throw PreconditionError("learning rate must be positive");
    }
  }

  std::size_t steps_taken() const { return t_; }
  const AdamConfig& config() const { return config_; }

  void step(PolicyNetwork& net, const NetworkGradients& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    auto update = [&](std::vector<double>& param, const std::vector<double>& g,
                      std::vector<double>& m, std::vector<double>& v) {
      for (std::size_t i = 0; i < param.size(); ++i) {
        m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
        v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
        const double m_hat = m[i] / c1;
        const double v_hat = v[i] / c2;
        param[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
      }
    };
    auto& layers = net.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      update(layers[l].weights, grad.layers[l].weights, m_.layers[l].weights,
             v_.layers[l].weights);
      update(layers[l].bias, grad.layers[l].bias, m_.layers[l].bias, v_.layers[l].bias);
    }
  }

 private:
  AdamConfig config_;
  NetworkGradients m_;
  NetworkGradients v_;
  std::size_t t_ = 0;
};

}  // namespace ceqlab

#endif  // CEQLAB_ADAM_HPP_
