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

#ifndef CEQLAB_GAME_IO_HPP_
#define CEQLAB_GAME_IO_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ceqlab/distribution.hpp"
#include "ceqlab/errors.hpp"
#include "ceqlab/game.hpp"
#include "json.hpp"

namespace ceqlab {

// {"players": [...], "decisions": [[...], ...], "payoffs": {"id": [...]}}
// Players without a payoffs entry are unknown.
struct LoadedGame {
  NormalFormGame game;
  std::vector<std::string> renormalized;  // players whose vectors were rescaled
};

namespace game_io_internal {

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

inline nlohmann::json parse(const std::string& text, const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source + ":" + std::to_string(line_of(text, e.byte)) +
                     ": malformed JSON (" + e.what() + ")");
  }
}

inline const nlohmann::json& field(const nlohmann::json& obj, const char* key,
                                   const std::string& source) {
  if (!obj.is_object()) throw InputError(source + ": top level must be a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(source + ": missing field '" + key + "'");
  return *it;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<double> numbers(const nlohmann::json& arr, const std::string& where) {
  if (!arr.is_array()) throw InputError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw InputError(where + "[" + std::to_string(i) + "]: expected a number");
    }
    out.push_back(arr[i].get<double>());
  }
  return out;
}

}  // namespace game_io_internal

inline LoadedGame parse_game(const std::string& text, const std::string& source = "<game>") {
  using namespace game_io_internal;
  const nlohmann::json doc = parse(text, source);

  const auto& players_j = field(doc, "players", source);
  if (!players_j.is_array()) throw InputError(source + ": players: expected an array");
  std::vector<std::string> players;
  for (std::size_t i = 0; i < players_j.size(); ++i) {
    if (!players_j[i].is_string()) {
      throw InputError(source + ": players[" + std::to_string(i) + "]: expected a string");
    }
    players.push_back(players_j[i].get<std::string>());
  }

  const auto& decisions_j = field(doc, "decisions", source);
  if (!decisions_j.is_array() || decisions_j.size() != players.size()) {
    throw InputError(source + ": decisions: expected one list per player");
  }
  std::vector<std::vector<std::string>> menus;
  for (std::size_t i = 0; i < decisions_j.size(); ++i) {
    const std::string where = source + ": decisions[" + std::to_string(i) + "]";
    if (!decisions_j[i].is_array()) throw InputError(where + ": expected an array of labels");
    std::vector<std::string> menu;
    for (const auto& d : decisions_j[i]) {
      if (!d.is_string()) throw InputError(where + ": labels must be strings");
      menu.push_back(d.get<std::string>());
    }
    menus.push_back(std::move(menu));
  }

  std::vector<std::string> renormalized;
  std::map<std::string, PayoffVector> payoffs;
  if (doc.contains("payoffs")) {
    const auto& pj = doc["payoffs"];
    if (!pj.is_object()) throw InputError(source + ": payoffs: expected an object");
    for (const auto& [id, arr] : pj.items()) {
      if (std::find(players.begin(), players.end(), id) == players.end()) {
        throw InputError(source + ": payoffs." + id + ": not a listed player");
      }
      const std::string where = source + ": payoffs." + id;
      bool renorm = false;
      try {
        payoffs[id] = PayoffVector::normalized(numbers(arr, where), &renorm);
      } catch (const InputError& e) {
        if (std::string(e.what()).starts_with(source)) throw;
        throw InputError(where + ": " + e.what());
      }
      if (renorm) renormalized.push_back(id);
    }
  }
  try {
    return LoadedGame{NormalFormGame(std::move(players), std::move(menus), std::move(payoffs)),
                      std::move(renormalized)};
  } catch (const InvalidArgumentError& e) {
    throw InputError(source + ": " + e.what());
  }
}

inline LoadedGame load_game(const std::string& path) {
  return parse_game(game_io_internal::read_file(path), path);
}

inline nlohmann::ordered_json to_json(const NormalFormGame& game) {
  nlohmann::ordered_json j;
  j["players"] = game.players();
  j["decisions"] = game.menus();
  nlohmann::ordered_json pay = nlohmann::ordered_json::object();
  for (const auto& id : game.players()) {
    auto it = game.payoffs().find(id);
    if (it != game.payoffs().end()) pay[id] = it->second.data();
  }
  j["payoffs"] = pay;
  return j;
}

// {"distribution": [...]} or a bare array.
inline JointDistribution parse_distribution(const std::string& text,
                                            const std::string& source = "<distribution>") {
  using namespace game_io_internal;
  const nlohmann::json doc = parse(text, source);
  const nlohmann::json& arr = doc.is_array() ? doc : field(doc, "distribution", source);
  std::vector<double> values = numbers(arr, source + ": distribution");
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0)) {
      throw InputError(source + ": distribution[" + std::to_string(i) + "]: negative entry");
    }
    sum += values[i];
  }
  if (values.empty() || std::abs(sum - 1.0) > kRenormalizeTolerance) {
    throw InputError(source + ": distribution sums to " + std::to_string(sum) + ", expected 1");
  }
  return JointDistribution::from_approximate(values, kRenormalizeTolerance);
}

inline JointDistribution load_distribution(const std::string& path) {
  return parse_distribution(game_io_internal::read_file(path), path);
}

}  // namespace ceqlab

#endif  // CEQLAB_GAME_IO_HPP_
