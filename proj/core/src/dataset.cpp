// Copyright 2026 The Rankforge Authors. All Rights Reserved.
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

#include "rankforge/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "rankforge/error.hpp"

namespace rankforge {

using nlohmann::json;

std::string datapoint_to_json_line(const DataPoint& dp) {
  json moves = json::array();
  for (const MoveEntry& m : dp.moves) moves.push_back({{"ply", m.ply}, {"state", m.state}, {"move", m.move}});
  json j = {{"match_id", dp.match_id}, {"player_id", dp.player_id}, {"side", to_string(dp.side)},
            {"game", to_string(dp.game)}, {"group_index", dp.group_index}, {"moves", std::move(moves)}};
  return j.dump();
}

DataPoint datapoint_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
    DataPoint dp;
    dp.match_id = j.at("match_id").get<std::string>();
    dp.player_id = j.at("player_id").get<std::string>();
    dp.side = parse_side(j.at("side").get<std::string>());
    dp.game = parse_game(j.at("game").get<std::string>());
    dp.group_index = j.at("group_index").get<int>();
    for (const json& m : j.at("moves"))
      dp.moves.push_back({m.at("ply").get<int>(), m.at("state").get<std::string>(), m.at("move").get<std::string>()});
    return dp;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad data point line: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("bad data point line: ") + e.what());
  }
}

void write_dataset(std::ostream& out, const std::vector<DataPoint>& points) {
  for (const DataPoint& dp : points) out << datapoint_to_json_line(dp) << '\n';
}

void write_dataset_file(const std::string& path, const std::vector<DataPoint>& points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_dataset(out, points);
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<DataPoint> read_dataset(std::istream& in) {
  std::vector<DataPoint> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(datapoint_from_json_line(line));
  }
  return out;
}

std::vector<DataPoint> read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_dataset(in);
}

}  // namespace rankforge
