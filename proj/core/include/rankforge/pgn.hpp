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

#include <string>
#include <string_view>
#include <vector>

#include "rankforge/records.hpp"

namespace rankforge {

// Parses one PGN game. SAN moves are resolved against the legal-move
// generator; an illegal or ambiguous move throws ParseError naming the move
// number.
MatchRecord parse_pgn(std::string_view text);

std::string serialize_pgn(const MatchRecord& record);

// Splits a concatenated multi-game PGN file into single-game texts.
std::vector<std::string> split_pgn_games(std::string_view text);

}  // namespace rankforge
