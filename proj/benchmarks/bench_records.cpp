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

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>

#include "rankforge/pgn.hpp"
#include "rankforge/sgf.hpp"

namespace {

std::string fixture(const std::string& rel) {
  std::ifstream in(std::string(RANKFORGE_FIXTURE_DIR) + "/" + rel);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void BM_ParseSgf(benchmark::State& state) {
  const std::string text = fixture("sgf/game000.sgf");
  for (auto _ : state) benchmark::DoNotOptimize(rankforge::parse_sgf(text));
}
BENCHMARK(BM_ParseSgf)->Unit(benchmark::kMicrosecond);

void BM_ParsePgn(benchmark::State& state) {
  const std::string text = fixture("pgn/game000.pgn");
  for (auto _ : state) benchmark::DoNotOptimize(rankforge::parse_pgn(text));
}
BENCHMARK(BM_ParsePgn)->Unit(benchmark::kMicrosecond);

}  // namespace
