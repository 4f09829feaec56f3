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

// Counter-based random streams. Every random decision in the pipeline is drawn
// from a stream derived from (root seed, named substream, integer counters), so
// results never depend on iteration or scheduling order.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace rankforge {

std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive hash of a seed, a substream name and counters.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::initializer_list<std::uint64_t> counters = {});

// 64-bit FNV-1a; used for schema and config hashes.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// Stateless draws keyed by (key, counter).
double uniform01_at(std::uint64_t key, std::uint64_t counter);
double normal_at(std::uint64_t key, std::uint64_t counter);

// Small sequential generator (xoshiro256**) seeded from a derived seed.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  // Uniform in [0, bound), unbiased (Lemire's method).
  std::uint64_t below(std::uint64_t bound);
  double uniform01();
  double normal();

 private:
  std::uint64_t s_[4];
};

// `count` distinct indices from [0, population), in draw order.
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t population,
                                                    std::size_t count);

}  // namespace rankforge
