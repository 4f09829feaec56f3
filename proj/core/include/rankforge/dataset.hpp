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

#pragma once

// JSONL data-point datasets: one DataPoint per line with fields
// match_id, player_id, side, game, group_index, moves[{ply, state, move}].

#include <iosfwd>
#include <string>
#include <vector>

#include "rankforge/records.hpp"

namespace rankforge {

std::string datapoint_to_json_line(const DataPoint& dp);
DataPoint datapoint_from_json_line(const std::string& line);

void write_dataset(std::ostream& out, const std::vector<DataPoint>& points);
void write_dataset_file(const std::string& path, const std::vector<DataPoint>& points);
std::vector<DataPoint> read_dataset(std::istream& in);
std::vector<DataPoint> read_dataset_file(const std::string& path);

}  // namespace rankforge
