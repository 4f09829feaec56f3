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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "rankforge/config.hpp"
#include "rankforge/error.hpp"
#include "rankforge/rng.hpp"
#include "test_support.hpp"

namespace rankforge {
namespace {

TEST(Hashes, PublishedReferenceValues) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(DeriveSeed, DeterministicAndSeparated) {
  EXPECT_EQ(derive_seed(7, "train", {1, 2}), derive_seed(7, "train", {1, 2}));
  EXPECT_NE(derive_seed(7, "train", {1, 2}), derive_seed(7, "train", {2, 1}));
  EXPECT_NE(derive_seed(7, "train", {1}), derive_seed(7, "eval", {1}));
  EXPECT_NE(derive_seed(7, "train", {1}), derive_seed(8, "train", {1}));
  EXPECT_NE(derive_seed(7, "train", {}), derive_seed(7, "train", {0}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(1, "s", {i}));
  EXPECT_EQ(seen.size(), 10000u);
}

TEST(KeyedDraws, UniformMomentsAndRange) {
  const std::uint64_t key = derive_seed(3, "moments");
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01_at(key, static_cast<std::uint64_t>(i));
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(var, 1.0 / 12, 0.002);
}

TEST(KeyedDraws, NormalMoments) {
  const std::uint64_t key = derive_seed(4, "normal");
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = normal_at(key, static_cast<std::uint64_t>(i));
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 5 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
  EXPECT_EQ(normal_at(key, 17), normal_at(key, 17));
}

TEST(Rng, ReproducibleStreams) {
  Rng a(99), b(99), c(100);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, BelowIsInRangeAndCoversAllValues) {
  Rng r(5);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  // Each cell is Binomial(n, 1/7); allow 5 sd.
  const double sd = std::sqrt(n * (1.0 / 7) * (6.0 / 7));
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5 * sd);
  EXPECT_EQ(r.below(0), 0u);
  EXPECT_EQ(r.below(1), 0u);
}

TEST(SampleWithoutReplacement, DistinctAndBounded) {
  Rng r(11);
  for (std::size_t pop : {1u, 5u, 50u}) {
    for (std::size_t k = 0; k <= pop; ++k) {
      const auto s = sample_without_replacement(r, pop, k);
      ASSERT_EQ(s.size(), k);
      std::set<std::size_t> u(s.begin(), s.end());
      EXPECT_EQ(u.size(), k);
      for (auto v : s) EXPECT_LT(v, pop);
    }
  }
  EXPECT_EQ(sample_without_replacement(r, 3, 10).size(), 3u);
}

TEST(SampleWithoutReplacement, FirstDrawIsUniform) {
  Rng r(12);
  std::vector<int> counts(4, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[sample_without_replacement(r, 4, 2)[0]];
  const double sd = std::sqrt(n * 0.25 * 0.75);
  for (int c : counts) EXPECT_NEAR(c, n / 4.0, 5 * sd);
}

TEST(Config, ParsesTablesArraysAndComments) {
  const Config c = Config::parse(
      "seed = 42  # root\n"
      "name = \"a # not a comment\"\n"
      "[synth]\n"
      "groups = 8\n"
      "lambda0 = 0.25\n"
      "on = true\n"
      "[features]\n"
      "loss = [\"mean@50\", \"std@inf\"]\n"
      "ns = [1, 5, 10]\n");
  EXPECT_EQ(c.get_int("seed", 0), 42);
  EXPECT_EQ(c.get_string("name", ""), "a # not a comment");
  EXPECT_EQ(c.get_int("synth.groups", 0), 8);
  EXPECT_DOUBLE_EQ(c.get_double("synth.lambda0", 0), 0.25);
  EXPECT_TRUE(c.get_bool("synth.on", false));
  EXPECT_EQ(c.get_strings("features.loss", {}), (std::vector<std::string>{"mean@50", "std@inf"}));
  EXPECT_EQ(c.get_doubles("features.ns", {}), (std::vector<double>{1, 5, 10}));
  EXPECT_EQ(c.get_int("missing", -3), -3);
  EXPECT_FALSE(c.contains("groups"));
}

TEST(Config, OverridesReplaceValues) {
  Config c = Config::parse("[synth]\ngroups = 8\n");
  c.set_from_string("synth.groups=5");
  c.set_from_string("eval.mode = \"player\"");
  c.set_from_string("train.ns=[2,4]");
  EXPECT_EQ(c.get_int("synth.groups", 0), 5);
  EXPECT_EQ(c.get_string("eval.mode", ""), "player");
  EXPECT_EQ(c.get_doubles("train.ns", {}), (std::vector<double>{2, 4}));
  EXPECT_THROW(c.set_from_string("no-equals"), ConfigError);
}

TEST(Config, ErrorsAreConfigErrors) {
  EXPECT_THROW(Config::parse("a = \"open\n"), ConfigError);
  EXPECT_THROW(Config::parse("[table\n"), ConfigError);
  EXPECT_THROW(Config::parse("just words\n"), ConfigError);
  EXPECT_THROW(Config::parse("= 3\n"), ConfigError);
  EXPECT_THROW(Config::parse("a = 3x\n"), ConfigError);
  EXPECT_THROW(Config::parse("a = [1, 2\n"), ConfigError);
  EXPECT_THROW(Config::load("/nonexistent/rankforge.toml"), ConfigError);
  const Config c = Config::parse("a = 1.5\nb = \"x\"\nc = [1]\n");
  EXPECT_THROW(c.get_int("a", 0), ConfigError);
  EXPECT_THROW(c.get_double("b", 0), ConfigError);
  EXPECT_THROW(c.get_bool("a", false), ConfigError);
  EXPECT_THROW(c.get_string("c", ""), ConfigError);
  EXPECT_THROW(c.get_strings("c", {}), ConfigError);
  EXPECT_THROW(c.get_doubles("a", {}), ConfigError);
}

TEST(Config, CanonicalFormAndHashIgnoreLayout) {
  const Config a = Config::parse("x = 1\n[s]\ny = \"v\"\n");
  const Config b = Config::parse("# comment\ns.y   =   \"v\"\n\nx=1.0\n");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.canonical(), "s.y = \"v\"\nx = 1\n");
  const Config c = Config::parse("x = 2\n[s]\ny = \"v\"\n");
  EXPECT_NE(a.hash(), c.hash());
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"desk.toml", "role_division.toml"}) {
    const Config c = Config::load(testing::config_path(name));
    EXPECT_TRUE(c.contains("seed")) << name;
    EXPECT_TRUE(c.contains("synth.groups")) << name;
  }
}

}  // namespace
}  // namespace rankforge
