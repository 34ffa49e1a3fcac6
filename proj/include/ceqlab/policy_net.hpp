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

#ifndef CEQLAB_POLICY_NET_HPP_
#define CEQLAB_POLICY_NET_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ceqlab/distribution.hpp"
#include "ceqlab/errors.hpp"
#include "ceqlab/rng.hpp"
#include "json.hpp"

namespace ceqlab {

enum class Activation { kLinear, kLeakyRelu, kRelu, kSoftmax };

inline constexpr double kLeakySlope = 0.2;
inline constexpr double kProbabilityGuard = 1e-12;

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::kLinear: return "linear";
    case Activation::kLeakyRelu: return "leaky_relu";
    case Activation::kRelu: return "relu";
    case Activation::kSoftmax: return "softmax";
  }
  return "unknown";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "linear") return Activation::kLinear;
  if (s == "leaky_relu") return Activation::kLeakyRelu;
  if (s == "relu") return Activation::kRelu;
  if (s == "softmax") return Activation::kSoftmax;
  throw InputError("unknown activation " + s);
}

// Fully connected layer; weights are out x in, row-major.
struct DenseLayer {
  std::string name;
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::kLinear;
  std::vector<double> weights;
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::string n, std::size_t i, std::size_t o, Activation act)
      : name(std::move(n)), in(i), out(o), activation(act), weights(i * o, 0.0), bias(o, 0.0) {}

  double& w(std::size_t r, std::size_t c) { return weights[r * in + c]; }
  double w(std::size_t r, std::size_t c) const { return weights[r * in + c]; }

  std::vector<double> affine(std::span<const double> x) const {
    std::vector<double> z(bias);
    for (std::size_t r = 0; r < out; ++r) {
      const double* row = &weights[r * in];
      double acc = 0.0;
      for (std::size_t c = 0; c < in; ++c) acc += row[c] * x[c];
      z[r] += acc;
    }
    return z;
  }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct NetworkShape {
  std::size_t state_dim = 4;
  std::size_t analyzer_width = 8;
  std::size_t mid_width = 16;
  std::size_t num_actions = 27;

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

// Layer order inside PolicyNetwork::layers().
enum LayerIndex : std::size_t {
  kAnalyzerCurrent = 0,
  kAnalyzerPrevious = 1,
  kFirstLeaky = 2,
  kFirstRelu = 5,
  kOutputLayer = 8,
  kNumLayers = 9,
};

// Activations recorded by one forward pass. Layer kFirstLeaky consumes the
// concatenation of both analyzer outputs.
struct ForwardTrace {
  std::vector<double> current;
  std::vector<double> previous;
  std::array<std::vector<double>, kNumLayers> pre;
  std::array<std::vector<double>, kNumLayers> post;

  const std::vector<double>& output() const { return post[kOutputLayer]; }
};

struct LayerGradient {
  std::vector<double> weights;
  std::vector<double> bias;
};

struct NetworkGradients {
  std::vector<LayerGradient> layers;

  void add(const NetworkGradients& other) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      for (std::size_t i = 0; i < layers[l].weights.size(); ++i) {
        layers[l].weights[i] += other.layers[l].weights[i];
      }
      for (std::size_t i = 0; i < layers[l].bias.size(); ++i) {
        layers[l].bias[i] += other.layers[l].bias[i];
      }
    }
  }
};

enum class LossForm {
  // -w * sum_j [y_j log p_j + (1 - y_j) log(1 - p_j)]
  kTwoSided,
  // -w * log p_chosen
  kReinforce,
};

inline const char* to_string(LossForm f) {
  return f == LossForm::kTwoSided ? "two_sided" : "reinforce";
}

// Two analyzer layers (one per input state), three Leaky ReLU layers of
// width W_mid, three ReLU layers of width 2 W_mid and a softmax output over
// the J actions.
class PolicyNetwork {
 public:
  PolicyNetwork() = default;

  // All parameters zero.
  explicit PolicyNetwork(const NetworkShape& shape, std::uint64_t seed = 0)
      : shape_(shape), seed_(seed) {
    if (shape.state_dim < 2 || shape.analyzer_width == 0 || shape.mid_width == 0 ||
        shape.num_actions == 0) {
      throw InvalidArgumentError("network widths must be positive");
    }
    const std::size_t a = shape.analyzer_width;
    const std::size_t m = shape.mid_width;
    layers_.emplace_back("analyzer_current", shape.state_dim, a, Activation::kLinear);
    layers_.emplace_back("analyzer_previous", shape.state_dim, a, Activation::kLinear);
    layers_.emplace_back("leaky_1", 2 * a, m, Activation::kLeakyRelu);
    layers_.emplace_back("leaky_2", m, m, Activation::kLeakyRelu);
    layers_.emplace_back("leaky_3", m, m, Activation::kLeakyRelu);
    layers_.emplace_back("relu_1", m, 2 * m, Activation::kRelu);
    layers_.emplace_back("relu_2", 2 * m, 2 * m, Activation::kRelu);
    layers_.emplace_back("relu_3", 2 * m, 2 * m, Activation::kRelu);
    layers_.emplace_back("output", 2 * m, shape.num_actions, Activation::kSoftmax);
  }

  // Glorot-uniform weights, zero biases.
  static PolicyNetwork initialize(const NetworkShape& shape, std::uint64_t seed) {
    PolicyNetwork net(shape, seed);
    Rng rng = derive_stream({seed, 0x6e6574ull});
    for (DenseLayer& layer : net.layers_) {
      const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
      for (double& w : layer.weights) w = uniform(rng, -limit, limit);
    }
    return net;
  }

  const NetworkShape& shape() const { return shape_; }
  std::uint64_t seed() const { return seed_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::size_t num_parameters() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
    return n;
  }

  ForwardTrace forward(const JointDistribution& current,
                       const JointDistribution& previous) const {
    if (current.size() != shape_.state_dim || previous.size() != shape_.state_dim) {
      throw InvalidArgumentError("forward: state width does not match network");
    }
    ForwardTrace t;
    t.current = current.values();
    t.previous = previous.values();
    run_layer(kAnalyzerCurrent, t.current, t);
    run_layer(kAnalyzerPrevious, t.previous, t);
    std::vector<double> joined = t.post[kAnalyzerCurrent];
    joined.insert(joined.end(), t.post[kAnalyzerPrevious].begin(),
                  t.post[kAnalyzerPrevious].end());
    run_layer(kFirstLeaky, joined, t);
    for (std::size_t l = kFirstLeaky + 1; l < kNumLayers; ++l) run_layer(l, t.post[l - 1], t);
    return t;
  }

  std::vector<double> action_probabilities(const JointDistribution& current,
                                           const JointDistribution& previous) const {
    return forward(current, previous).output();
  }

  NetworkGradients zero_gradients() const {
    NetworkGradients g;
    for (const auto& l : layers_) {
      g.layers.push_back({std::vector<double>(l.weights.size(), 0.0),
                          std::vector<double>(l.bias.size(), 0.0)});
    }
    return g;
  }

  friend bool operator==(const PolicyNetwork&, const PolicyNetwork&) = default;

 private:
  void run_layer(std::size_t l, std::span<const double> input, ForwardTrace& t) const {
    const DenseLayer& layer = layers_[l];
    t.pre[l] = layer.affine(input);
    std::vector<double>& y = t.post[l];
    y = t.pre[l];
    switch (layer.activation) {
      case Activation::kLinear:
        break;
      case Activation::kLeakyRelu:
        for (double& v : y) v = v >= 0.0 ? v : kLeakySlope * v;
        break;
      case Activation::kRelu:
        for (double& v : y) v = std::max(v, 0.0);
        break;
      case Activation::kSoftmax: {
        const double top = *std::max_element(y.begin(), y.end());
        double sum = 0.0;
        for (double& v : y) {
          v = std::exp(v - top);
          sum += v;
        }
        for (double& v : y) v /= sum;
        break;
      }
    }
    for (double v : y) {
      if (!std::isfinite(v)) throw NumericError("non-finite activation", l);
    }
  }

  NetworkShape shape_;
  std::uint64_t seed_ = 0;
  std::vector<DenseLayer> layers_;
};

inline double guarded(double p) {
  if (std::isnan(p)) throw NumericError("probability is NaN");
  return std::clamp(p, kProbabilityGuard, 1.0 - kProbabilityGuard);
}

// Weighted logarithmic loss of one output against a one-hot target.
inline double weighted_log_loss(std::span<const double> probs, std::span<const double> target,
                                double weight, LossForm form = LossForm::kTwoSided) {
  double loss = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const double p = guarded(probs[j]);
    if (form == LossForm::kTwoSided) {
      loss -= target[j] * std::log(p) + (1.0 - target[j]) * std::log(1.0 - p);
    } else if (target[j] > 0.0) {
      loss -= target[j] * std::log(p);
    }
  }
  return weight * loss;
}

// d loss / d logits through the softmax.
inline std::vector<double> loss_logit_gradient(std::span<const double> probs,
                                               std::span<const double> target, double weight,
                                               LossForm form = LossForm::kTwoSided) {
  const std::size_t k = probs.size();
  std::vector<double> dz(k, 0.0);
  if (form == LossForm::kReinforce) {
    double mass = 0.0;
    for (double y : target) mass += y;
    for (std::size_t j = 0; j < k; ++j) dz[j] = weight * (mass * probs[j] - target[j]);
    return dz;
  }
  std::vector<double> dp(k);
  double mean = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double p = guarded(probs[j]);
    dp[j] = -weight * (target[j] / p - (1.0 - target[j]) / (1.0 - p));
    mean += dp[j] * probs[j];
  }
  for (std::size_t j = 0; j < k; ++j) dz[j] = probs[j] * (dp[j] - mean);
  return dz;
}

// Analytic gradient of weighted_log_loss with respect to every parameter,
// accumulated into `grads`.
inline void accumulate_gradients(const PolicyNetwork& net, const ForwardTrace& trace,
                                 std::span<const double> target, double weight,
                                 NetworkGradients& grads,
                                 LossForm form = LossForm::kTwoSided) {
  if (weight == 0.0) return;
  const auto& layers = net.layers();
  std::vector<double> delta = loss_logit_gradient(trace.output(), target, weight, form);

  auto backprop = [&](std::size_t l, std::span<const double> input,
                      std::span<const double> dz) {
    const DenseLayer& layer = layers[l];
    LayerGradient& g = grads.layers[l];
    std::vector<double> dx(layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      if (dz[r] == 0.0) continue;
      g.bias[r] += dz[r];
      double* gw = &g.weights[r * layer.in];
      const double* w = &layer.weights[r * layer.in];
      for (std::size_t c = 0; c < layer.in; ++c) {
        gw[c] += dz[r] * input[c];
        dx[c] += w[c] * dz[r];
      }
    }
    return dx;
  };

  std::vector<double> upstream = backprop(kOutputLayer, trace.post[kOutputLayer - 1], delta);
  for (std::size_t l = kOutputLayer - 1; l >= kFirstLeaky; --l) {
    std::vector<double> dz(upstream.size());
    for (std::size_t i = 0; i < dz.size(); ++i) {
      const double z = trace.pre[l][i];
      double slope = 1.0;
      if (layers[l].activation == Activation::kRelu) slope = z > 0.0 ? 1.0 : 0.0;
      if (layers[l].activation == Activation::kLeakyRelu) slope = z >= 0.0 ? 1.0 : kLeakySlope;
      dz[i] = upstream[i] * slope;
    }
    if (l == kFirstLeaky) {
      std::vector<double> joined = trace.post[kAnalyzerCurrent];
      joined.insert(joined.end(), trace.post[kAnalyzerPrevious].begin(),
                    trace.post[kAnalyzerPrevious].end());
      upstream = backprop(l, joined, dz);
      break;
    }
    upstream = backprop(l, trace.post[l - 1], dz);
  }
  const std::size_t a = layers[kAnalyzerCurrent].out;
  std::span<const double> d_joined(upstream);
  backprop(kAnalyzerCurrent, trace.current, d_joined.subspan(0, a));
  backprop(kAnalyzerPrevious, trace.previous, d_joined.subspan(a, a));
}

inline NetworkGradients gradients(const PolicyNetwork& net, const ForwardTrace& trace,
                                  std::span<const double> target, double weight,
                                  LossForm form = LossForm::kTwoSided) {
  NetworkGradients g = net.zero_gradients();
  accumulate_gradients(net, trace, target, weight, g, form);
  return g;
}

// Checkpoint: widths, layer order, row-major weights and the seed. Doubles
// are written in shortest round-trip form, so load(save(x)) == x bit-exactly.
inline nlohmann::json to_json(const PolicyNetwork& net) {
  nlohmann::json j;
  j["format"] = "ceqlab.policy.v1";
  j["seed"] = net.seed();
  j["widths"] = {{"state_dim", net.shape().state_dim},
                 {"analyzer", net.shape().analyzer_width},
                 {"mid", net.shape().mid_width},
                 {"actions", net.shape().num_actions}};
  j["layers"] = nlohmann::json::array();
  for (const auto& l : net.layers()) {
    j["layers"].push_back({{"name", l.name},
                           {"in", l.in},
                           {"out", l.out},
                           {"activation", to_string(l.activation)},
                           {"weights", l.weights},
                           {"bias", l.bias}});
  }
  return j;
}

inline PolicyNetwork policy_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "ceqlab.policy.v1") {
      throw InputError("unsupported checkpoint format");
    }
    const auto& w = j.at("widths");
    NetworkShape shape{w.at("state_dim").get<std::size_t>(), w.at("analyzer").get<std::size_t>(),
                       w.at("mid").get<std::size_t>(), w.at("actions").get<std::size_t>()};
    PolicyNetwork net(shape, j.at("seed").get<std::uint64_t>());
    const auto& layers = j.at("layers");
    if (layers.size() != net.layers().size()) throw InputError("checkpoint layer count mismatch");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      DenseLayer& dst = net.layers()[l];
      const auto& src = layers[l];
      if (src.at("name").get<std::string>() != dst.name ||
          src.at("in").get<std::size_t>() != dst.in ||
          src.at("out").get<std::size_t>() != dst.out ||
          activation_from_string(src.at("activation").get<std::string>()) != dst.activation) {
        throw InputError("checkpoint layer " + std::to_string(l) + " does not match widths");
      }
      auto weights = src.at("weights").get<std::vector<double>>();
      auto bias = src.at("bias").get<std::vector<double>>();
      if (weights.size() != dst.weights.size() || bias.size() != dst.bias.size()) {
        throw InputError("checkpoint layer " + std::to_string(l) + " has wrong parameter count");
      }
      dst.weights = std::move(weights);
      dst.bias = std::move(bias);
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace ceqlab

#endif  // CEQLAB_POLICY_NET_HPP_
