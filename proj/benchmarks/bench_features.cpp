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

#include <memory>

#include "rankforge/features.hpp"
#include "rankforge/synthlab.hpp"

namespace {

void BM_ExtractSynthetic(benchmark::State& state) {
  rankforge::SynthConfig cfg;
  const auto model = std::make_shared<const rankforge::SynthModel>(cfg);
  const auto points = rankforge::synth_datapoints(*model, static_cast<int>(state.range(0)), "bench");
  auto backend = std::make_shared<rankforge::SyntheticBackend>(model);
  rankforge::BackendSet set{rankforge::Game::kSynthetic, backend, backend, backend};
  rankforge::FeatureConfig fc;
  fc.policy_levels = cfg.level_labels();
  fc.loss_selected = {rankforge::LossSelection::parse("mean@50"), rankforge::LossSelection::parse("std@50")};
  for (auto _ : state) benchmark::DoNotOptimize(rankforge::extract_features(points, set, fc));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(points.size()));
}
BENCHMARK(BM_ExtractSynthetic)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_AverageRows(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<double>> rows(n, std::vector<double>(12, 0.5));
  std::vector<const std::vector<double>*> ptrs;
  for (const auto& r : rows) ptrs.push_back(&r);
  std::vector<double> out;
  for (auto _ : state) {
    rankforge::average_rows(ptrs, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_AverageRows)->Arg(1)->Arg(20);

}  // namespace
