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

#include <random>

#include "rankforge/error.hpp"
#include "rankforge/gbdt.hpp"
#include "test_support.hpp"

namespace rankforge {
namespace {

struct Fixture {
  Matrix x;
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
};

// Random regression data; `discrete` draws small integers to force ties.
Fixture make_fixture(std::uint64_t seed, std::size_t n, std::size_t d, bool discrete) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> small(0, 4);
  Fixture f;
  f.x = Matrix(0, d);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(d);
    for (double& v : r) v = discrete ? small(gen) : nd(gen);
    const double target = std::sin(r[0]) + (d > 1 ? 0.5 * r[1] * r[1 % d] : 0.0) + 0.3 * nd(gen);
    f.x.append_row(r);
    f.rows.push_back(r);
    f.y.push_back(discrete ? std::round(target * 4) / 4 : target);
  }
  return f;
}

double mse(const TreeEnsemble& m, const Fixture& f, std::size_t trees) {
  double s = 0;
  for (std::size_t i = 0; i < f.y.size(); ++i) {
    const double e = m.predict_prefix(f.x.row(i), trees) - f.y[i];
    s += e * e;
  }
  return s / static_cast<double>(f.y.size());
}

TEST(Gbdt, ConstantTargetPredictsTheConstant) {
  Fixture f = make_fixture(1, 60, 2, false);
  std::fill(f.y.begin(), f.y.end(), 2.75);
  GbdtParams p;
  p.min_samples_leaf = 5;
  const TreeEnsemble m = fit(f.x, f.y, p);
  EXPECT_TRUE(m.trees.empty());
  for (std::size_t i = 0; i < f.y.size(); ++i) EXPECT_EQ(m.predict(f.x.row(i)), 2.75);
}

TEST(Gbdt, OneDimensionalStep) {
  Matrix x(0, 1);
  for (double v : {0.0, 1.0, 2.0, 3.0}) x.append_row(std::vector<double>{v});
  const std::vector<double> y{0, 0, 1, 1};
  GbdtParams p;
  p.num_trees = 1;
  p.max_leaves = 2;
  p.min_samples_leaf = 1;
  p.learning_rate = 1.0;
  const TreeEnsemble m = fit(x, y, p);
  ASSERT_EQ(m.trees.size(), 1u);
  const TreeNode& root = m.trees[0].nodes[0];
  EXPECT_EQ(root.feature, 0);
  EXPECT_GT(root.threshold, 1.0);
  EXPECT_LT(root.threshold, 2.0);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(m.predict(x.row(i)), y[i]);
  // Brute force over the three thresholds picks the same one.
  const auto brute = testing::exhaustive_split({{0}, {1}, {2}, {3}}, {-0.5, -0.5, 0.5, 0.5}, 1);
  ASSERT_TRUE(brute);
  EXPECT_EQ(brute->threshold, root.threshold);
}

TEST(Gbdt, MoreTreesFitBetter) {
  const Fixture f = make_fixture(2, 200, 3, false);
  GbdtParams p;
  p.num_trees = 50;
  p.min_samples_leaf = 5;
  const TreeEnsemble m = fit(f.x, f.y, p);
  EXPECT_LT(mse(m, f, 50), mse(m, f, 10));
}

// The first tree's root split equals an exhaustive search on the initial
// residuals for many small fixtures, including heavily tied ones.
TEST(Gbdt, FirstSplitMatchesExhaustiveSearch) {
  int with_split = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    std::mt19937_64 gen(seed * 7 + 1);
    const std::size_t n = 2 + gen() % 99;
    const std::size_t d = 1 + gen() % 3;
    const bool discrete = seed % 3 == 0;
    const Fixture f = make_fixture(seed, n, d, discrete);
    GbdtParams p;
    p.num_trees = 1;
    p.min_samples_leaf = 1 + static_cast<int>(gen() % 10);
    const TreeEnsemble m = fit(f.x, f.y, p);
    std::vector<double> residual;
    for (double v : f.y) residual.push_back(v - m.base_score);
    const auto brute = testing::exhaustive_split(f.rows, residual, p.min_samples_leaf);
    if (!brute) {
      EXPECT_TRUE(m.trees.empty()) << "seed " << seed;
      continue;
    }
    ASSERT_EQ(m.trees.size(), 1u) << "seed " << seed;
    const TreeNode& root = m.trees[0].nodes[0];
    EXPECT_EQ(root.feature, brute->feature) << "seed " << seed;
    EXPECT_EQ(root.threshold, brute->threshold) << "seed " << seed;
    ++with_split;
  }
  EXPECT_GT(with_split, 200);
}

TEST(Gbdt, BestSplitAgreesWithExhaustiveSearch) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Fixture f = make_fixture(seed + 1000, 40 + seed % 50, 1 + seed % 3, seed % 2 == 0);
    std::vector<std::size_t> rows(f.y.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const auto s = best_split(f.x, f.y, rows, 3);
    const auto b = testing::exhaustive_split(f.rows, f.y, 3);
    ASSERT_EQ(s.has_value(), b.has_value());
    if (!s) continue;
    EXPECT_EQ(s->feature, b->feature);
    EXPECT_EQ(s->threshold, b->threshold);
    EXPECT_NEAR(s->gain, b->gain, 1e-9 * std::max(1.0, b->gain));
  }
}

TEST(Gbdt, TrainingErrorNeverIncreases) {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const Fixture f = make_fixture(seed, 300, 3, seed == 13);
    GbdtParams p;
    p.min_samples_leaf = 5;
    const TreeEnsemble m = fit(f.x, f.y, p);
    double prev = mse(m, f, 0);
    for (std::size_t t = 1; t <= m.trees.size(); ++t) {
      const double cur = mse(m, f, t);
      EXPECT_LE(cur, prev) << "seed " << seed << " tree " << t;
      prev = cur;
    }
  }
}

TEST(Gbdt, LeafLimitAndMinimumLeafSize) {
  const Fixture f = make_fixture(21, 500, 3, false);
  GbdtParams p;
  p.num_trees = 5;
  p.max_leaves = 7;
  p.min_samples_leaf = 30;
  const TreeEnsemble m = fit(f.x, f.y, p);
  for (const Tree& t : m.trees) {
    EXPECT_LE(t.leaf_count(), 7);
    std::vector<int> counts(t.nodes.size(), 0);
    for (std::size_t i = 0; i < f.y.size(); ++i) {
      int n = 0;
      while (t.nodes[n].feature >= 0)
        n = f.x.at(i, t.nodes[n].feature) <= t.nodes[n].threshold ? t.nodes[n].left : t.nodes[n].right;
      ++counts[n];
    }
    for (std::size_t n = 0; n < t.nodes.size(); ++n) {
      if (t.nodes[n].feature < 0) {
        EXPECT_GE(counts[n], 30);
      }
    }
  }
}

TEST(Gbdt, SerializationPreservesPredictions) {
  const Fixture f = make_fixture(31, 400, 3, false);
  GbdtParams p;
  p.min_samples_leaf = 5;
  p.feature_fraction = 0.67;
  p.seed = 99;
  const TreeEnsemble m = fit(f.x, f.y, p, "schema-x");
  const TreeEnsemble back = TreeEnsemble::from_json(m.to_json());
  EXPECT_EQ(back, m);
  std::mt19937_64 gen(77);
  std::normal_distribution<double> nd(0, 2);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> r{nd(gen), nd(gen), nd(gen)};
    EXPECT_EQ(back.predict(r), m.predict(r));
  }
  EXPECT_EQ(back.schema_id, "schema-x");
}

TEST(Gbdt, Determinism) {
  const Fixture f = make_fixture(41, 300, 3, false);
  GbdtParams p;
  p.feature_fraction = 0.5;
  p.seed = 5;
  EXPECT_EQ(fit(f.x, f.y, p), fit(f.x, f.y, p));
}

TEST(Gbdt, Validation) {
  GbdtParams p;
  p.max_leaves = 1;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.learning_rate = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  Matrix x(0, 1);
  x.append_row(std::vector<double>{1.0});
  EXPECT_THROW(fit(x, {1.0}, GbdtParams{}), DomainError);
  EXPECT_THROW(TreeEnsemble::from_json("{\"format\":\"other\"}"), ParseError);
  const TreeEnsemble empty;
  EXPECT_THROW(empty.predict(std::vector<double>{1, 2}), DomainError);
}

}  // namespace
}  // namespace rankforge
