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

#include <string>

#include "ceqlab/game_io.hpp"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace ceqlab {
namespace {

using ::testing::HasSubstr;

std::string ErrorOf(const std::string& text) {
  try {
    parse_game(text, "g.json");
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

TEST(ParseGame, ShippedFixturesLoad) {
  for (const char* name : {"reference_game.json", "chicken.json", "dominant.json",
                           "three_player.json", "stalled_three_player.json"}) {
    const LoadedGame g = load_game(std::string(CEQLAB_GAMES_DIR) + "/" + name);
    for (std::size_t i = 0; i < g.game.num_players(); ++i) {
      EXPECT_TRUE(g.game.has_payoff(i)) << name;
    }
  }
}

TEST(ParseGame, MalformedJsonReportsLine) {
  EXPECT_THAT(ErrorOf("{\n  \"players\": [\"a\",\n  oops\n}"), HasSubstr("g.json:3: malformed JSON"));
}

TEST(ParseGame, MissingFields) {
  EXPECT_THAT(ErrorOf("{\"decisions\": []}"), HasSubstr("missing field 'players'"));
  EXPECT_THAT(ErrorOf("{\"players\": [\"a\", \"b\"]}"), HasSubstr("missing field 'decisions'"));
  EXPECT_THAT(ErrorOf("[1, 2]"), HasSubstr("top level must be a JSON object"));
}

TEST(ParseGame, BadEntries) {
  const std::string head = R"({"players": ["a", "b"], "decisions": [["x", "y"], ["x", "y"]], )";
  EXPECT_THAT(ErrorOf(head + R"("payoffs": {"a": [0.5, "q", 0.25, 0.25]}})"),
              HasSubstr("payoffs.a[1]: expected a number"));
  EXPECT_THAT(ErrorOf(head + R"("payoffs": {"z": [0.25, 0.25, 0.25, 0.25]}})"),
              HasSubstr("payoffs.z: not a listed player"));
  EXPECT_THAT(ErrorOf(head + R"("payoffs": {"a": [0.5, -0.1, 0.3, 0.3]}})"),
              HasSubstr("payoffs.a"));
  EXPECT_THAT(ErrorOf(head + R"("payoffs": {"a": [0.5, 0.5, 0.5, 0.5]}})"),
              HasSubstr("payoffs.a"));
  EXPECT_THAT(ErrorOf(R"({"players": ["a", "b"], "decisions": [["x"]]})"),
              HasSubstr("decisions: expected one list per player"));
}

TEST(ParseGame, RenormalizesWithinTolerance) {
  const LoadedGame g = parse_game(R"({"players": ["a", "b"], "decisions": [["x", "y"], ["x", "y"]],
    "payoffs": {"a": [0.25, 0.25, 0.25, 0.2500005], "b": [0.25, 0.25, 0.25, 0.25]}})");
  EXPECT_EQ(g.renormalized, std::vector<std::string>{"a"});
  double sum = 0.0;
  for (double x : g.game.payoff(0).data()) sum += x;
  EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(ParseGame, PayoffsAreOptional) {
  const LoadedGame g = load_game(std::string(CEQLAB_GAMES_DIR) + "/chicken_missing_p2.json");
  EXPECT_TRUE(g.game.has_payoff(0));
  EXPECT_FALSE(g.game.has_payoff(1));
}

TEST(ParseGame, JsonRoundTrip) {
  const LoadedGame g = load_game(std::string(CEQLAB_GAMES_DIR) + "/three_player.json");
  const LoadedGame back = parse_game(to_json(g.game).dump());
  EXPECT_EQ(back.game.players(), g.game.players());
  EXPECT_EQ(back.game.menus(), g.game.menus());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t h = 0; h < 8; ++h) {
      EXPECT_NEAR(back.game.payoff(i)[h], g.game.payoff(i)[h], 1e-15);
    }
  }
}

TEST(LoadGame, MissingFile) {
  EXPECT_THROW(load_game("/nonexistent/game.json"), InputError);
}

TEST(ParseDistribution, Forms) {
  EXPECT_EQ(parse_distribution("[0.5, 0.5]").values(), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(parse_distribution(R"({"distribution": [1, 0, 0, 0]})").values(),
            (std::vector<double>{1, 0, 0, 0}));
  EXPECT_THROW(parse_distribution("[0.5, 0.6]"), InputError);
  EXPECT_THROW(parse_distribution("[1.5, -0.5]"), InputError);
  EXPECT_THROW(parse_distribution("{\"p\": [1]}"), InputError);
  EXPECT_THROW(parse_distribution("[]"), InputError);
}

}  // namespace
}  // namespace ceqlab
