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

#include <cmath>
#include <limits>
#include <vector>

#include "ceqlab/policy_net.hpp"
#include "gradcheck.hpp"
#include "gtest/gtest.h"

namespace ceqlab {
namespace {

const NetworkShape kSmall{4, 8, 16, 27};

TEST(Forward, ZeroParametersGiveUniformOutput) {
  const PolicyNetwork net(kSmall);
  const auto p = net.action_probabilities(JointDistribution::uniform(4),
                                          JointDistribution::point_mass(4, 2));
  ASSERT_EQ(p.size(), 27u);
  for (double x : p) EXPECT_NEAR(x, 1.0 / 27, 1e-15);
  EXPECT_NEAR(p[0], 0.0370, 1e-4);
}

TEST(Forward, LayerTopology) {
  const PolicyNetwork net(NetworkShape{4, 64, 128, 27});
  const auto& l = net.layers();
  ASSERT_EQ(l.size(), 9u);
  EXPECT_EQ(l[kAnalyzerCurrent].in, 4u);
  EXPECT_EQ(l[kAnalyzerCurrent].out, 64u);
  EXPECT_EQ(l[kFirstLeaky].in, 128u);
  for (std::size_t i = kFirstLeaky; i < kFirstRelu; ++i) {
    EXPECT_EQ(l[i].out, 128u);
    EXPECT_EQ(l[i].activation, Activation::kLeakyRelu);
  }
  for (std::size_t i = kFirstRelu; i < kOutputLayer; ++i) {
    EXPECT_EQ(l[i].out, 256u);
    EXPECT_EQ(l[i].activation, Activation::kRelu);
  }
  EXPECT_EQ(l[kOutputLayer].out, 27u);
  EXPECT_EQ(l[kOutputLayer].activation, Activation::kSoftmax);
}

TEST(Forward, SoftmaxPositiveAndNormalizedOverRandomDraws) {
  Rng rng = derive_stream({17});
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const PolicyNetwork net = PolicyNetwork::initialize(kSmall, seed);
    const auto p = net.action_probabilities(gradcheck::RandomState(rng, 4),
                                            gradcheck::RandomState(rng, 4));
    double sum = 0.0;
    for (double x : p) {
      ASSERT_GT(x, 0.0);
      sum += x;
    }
    ASSERT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(Forward, LeakySlopeOnNegativeInputs) {
  PolicyNetwork net(NetworkShape{2, 1, 1, 3});
  net.layers()[kAnalyzerCurrent].bias[0] = -1.0;
  net.layers()[kFirstLeaky].w(0, 0) = 1.0;
  const ForwardTrace t = net.forward(JointDistribution::uniform(2), JointDistribution::uniform(2));
  EXPECT_DOUBLE_EQ(t.pre[kFirstLeaky][0], -1.0);
  EXPECT_DOUBLE_EQ(t.post[kFirstLeaky][0], -kLeakySlope);
}

TEST(Forward, InputOrderMatters) {
  const PolicyNetwork net = PolicyNetwork::initialize(kSmall, 3);
  const auto a = JointDistribution({0.7, 0.1, 0.1, 0.1});
  const auto b = JointDistribution::uniform(4);
  EXPECT_NE(net.action_probabilities(a, b), net.action_probabilities(b, a));
}

TEST(Forward, NonFiniteReportsLayer) {
  PolicyNetwork net = PolicyNetwork::initialize(kSmall, 1);
  net.layers()[kFirstRelu].bias[0] = std::numeric_limits<double>::quiet_NaN();
  try {
    net.forward(JointDistribution::uniform(4), JointDistribution::uniform(4));
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_EQ(e.layer(), static_cast<std::size_t>(kFirstRelu));
  }
}

TEST(Forward, StateWidthMismatch) {
  const PolicyNetwork net(kSmall);
  EXPECT_THROW(net.forward(JointDistribution::uniform(3), JointDistribution::uniform(4)),
               InvalidArgumentError);
}

TEST(Initialize, GlorotBoundsAndZeroBias) {
  const PolicyNetwork net = PolicyNetwork::initialize(kSmall, 42);
  for (const auto& l : net.layers()) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    for (double w : l.weights) {
      EXPECT_LE(std::abs(w), limit);
    }
    for (double b : l.bias) EXPECT_EQ(b, 0.0);
  }
  EXPECT_EQ(PolicyNetwork::initialize(kSmall, 42), net);
  EXPECT_FALSE(PolicyNetwork::initialize(kSmall, 43) == net);
}

TEST(Gradients, MatchFiniteDifferencesTwoSided) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = gradcheck::Check(seed, LossForm::kTwoSided);
    EXPECT_GT(r.checked, 0u);
    EXPECT_LT(r.max_relative_error, 1e-4) << "seed " << seed;
  }
}

TEST(Gradients, MatchFiniteDifferencesReinforce) {
  for (std::uint64_t seed = 11; seed <= 15; ++seed) {
    const auto r = gradcheck::Check(seed, LossForm::kReinforce);
    EXPECT_LT(r.max_relative_error, 1e-4) << "seed " << seed;
  }
}

TEST(Gradients, ZeroWeightAndLinearity) {
  const PolicyNetwork net = PolicyNetwork::initialize(kSmall, 9);
  const ForwardTrace t = net.forward(JointDistribution::uniform(4),
                                     JointDistribution({0.1, 0.2, 0.3, 0.4}));
  std::vector<double> y(27, 0.0);
  y[5] = 1.0;
  const NetworkGradients zero = gradients(net, t, y, 0.0);
  for (const auto& l : zero.layers) {
    for (double g : l.weights) EXPECT_EQ(g, 0.0);
    for (double g : l.bias) EXPECT_EQ(g, 0.0);
  }
  const NetworkGradients one = gradients(net, t, y, 0.75);
  const NetworkGradients two = gradients(net, t, y, 1.5);
  for (std::size_t l = 0; l < one.layers.size(); ++l) {
    for (std::size_t i = 0; i < one.layers[l].weights.size(); ++i) {
      EXPECT_NEAR(two.layers[l].weights[i], 2.0 * one.layers[l].weights[i],
                  1e-15 + 1e-12 * std::abs(one.layers[l].weights[i]));
    }
  }
}

TEST(Loss, GuardKeepsLogsFinite) {
  const std::vector<double> p{1.0, 0.0};
  const std::vector<double> y{0.0, 1.0};
  const double loss = weighted_log_loss(p, y, 1.0);
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_NEAR(loss, -2.0 * std::log(kProbabilityGuard), 1e-3);
  const std::vector<double> bad{std::numeric_limits<double>::quiet_NaN(), 1.0};
  EXPECT_THROW(weighted_log_loss(bad, y, 1.0), NumericError);
}

TEST(Checkpoint, BitExactRoundTrip) {
  PolicyNetwork net = PolicyNetwork::initialize(kSmall, 1234);
  net.layers()[kOutputLayer].bias[3] = 0.1 + 0.2;
  const std::string text = to_json(net).dump();
  const PolicyNetwork back = policy_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back, net);
  EXPECT_EQ(to_json(back).dump(), text);
}

TEST(Checkpoint, RejectsMismatchedWidths) {
  auto j = to_json(PolicyNetwork::initialize(kSmall, 1));
  j["widths"]["mid"] = 17;
  EXPECT_THROW(policy_from_json(j), InputError);
  auto k = to_json(PolicyNetwork::initialize(kSmall, 1));
  k["format"] = "other";
  EXPECT_THROW(policy_from_json(k), InputError);
}

}  // namespace
}  // namespace ceqlab
