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

#include "rankforge/records.hpp"

namespace rankforge {

// Parses the main line of the first game tree in `text`. Variations are
// skipped. Throws ParseError (with byte offset) on malformed input.
MatchRecord parse_sgf(std::string_view text);

std::string serialize_sgf(const MatchRecord& record);

}  // namespace rankforge
