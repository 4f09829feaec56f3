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

#include <random>

#include "rankforge/gbdt.hpp"

namespace {

using rankforge::Matrix;

void make_data(std::size_t n, std::size_t d, Matrix& x, std::vector<double>& y) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  x = Matrix(0, d);
  y.clear();
  std::vector<double> r(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : r) v = nd(gen);
    x.append_row(r);
    y.push_back(r[0] + 0.5 * r[1 % d] * r[(d - 1)] + 0.2 * nd(gen));
  }
}

void BM_GbdtFit(benchmark::State& state) {
  Matrix x;
  std::vector<double> y;
  make_data(static_cast<std::size_t>(state.range(0)), 12, x, y);
  rankforge::GbdtParams p;
  p.num_trees = 20;
  for (auto _ : state) benchmark::DoNotOptimize(rankforge::fit(x, y, p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GbdtFit)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_GbdtPredict(benchmark::State& state) {
  Matrix x;
  std::vector<double> y;
  make_data(4000, 12, x, y);
  const auto model = rankforge::fit(x, y, {});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predict(x.row(i)));
    i = (i + 1) % x.rows;
  }
}
BENCHMARK(BM_GbdtPredict);

}  // namespace

BENCHMARK_MAIN();
