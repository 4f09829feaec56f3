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
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "rankforge/error.hpp"
#include "rankforge/features.hpp"
#include "rankforge/rng.hpp"
#include "rankforge/synthlab.hpp"
#include "test_support.hpp"

namespace rankforge {
namespace {

// Answers from fixed tables; unknown queries fail.
class TableBackend : public Backend {
 public:
  std::map<std::string, double> strength;  // state|move
  std::map<std::string, double> policy;    // state|move|level
  std::map<std::string, double> value;     // state
  std::vector<std::string> level_names;

  std::string identity() const override { return "table"; }
  std::vector<std::string> levels() const override { return level_names; }
  std::vector<EvalOutcome> evaluate(const std::vector<EvalQuery>& qs) override {
    std::vector<EvalOutcome> out;
    for (const auto& q : qs) {
      const std::map<std::string, double>* table = &value;
      std::string key = q.state;
      if (q.kind == EvalKind::kStrength) {
        table = &strength;
        key += "|" + *q.move;
      } else if (q.kind == EvalKind::kPolicy) {
        table = &policy;
        key += "|" + *q.move + "|" + *q.level;
      }
      auto it = table->find(key);
      out.push_back(it == table->end() ? EvalOutcome::failure("no entry " + key) : EvalOutcome::success(it->second));
    }
    return out;
  }
};

TEST(Logit, SymmetryPointIsExactlyZero) { EXPECT_EQ(logit(0.5), 0.0); }

TEST(Logit, Antisymmetry) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(1e-5, 1 - 1e-5);
  for (int i = 0; i < 10000; ++i) {
    const double w = u(gen);
    EXPECT_NEAR(logit(w) + logit(1 - w), 0.0, 1e-12) << w;
  }
}

TEST(Logit, KnownValueAndClamp) {
  EXPECT_NEAR(logit(0.9), 2.1972245773362196, 1e-12);
  std::size_t clamped = 0;
  EXPECT_NEAR(logit_counted(1.0, clamped), std::log((1 - kWinRateEpsilon) / kWinRateEpsilon), 1e-9);
  EXPECT_NEAR(logit_counted(0.0, clamped), -std::log((1 - kWinRateEpsilon) / kWinRateEpsilon), 1e-9);
  logit_counted(0.3, clamped);
  EXPECT_EQ(clamped, 2u);
}

TEST(MeanStrength, Examples) {
  EXPECT_DOUBLE_EQ(mean_strength({1, 1, 1}), 1);
  EXPECT_DOUBLE_EQ(mean_strength({0, 2}), 1);
  EXPECT_THROW(mean_strength({}), DomainError);
}

TEST(MeanStrength, MatchesCompensatedSum) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd(0.3, 1.0);
  std::vector<double> b(50);
  for (double& x : b) x = nd(gen);
  const double oracle = testing::compensated_sum(b) / 50.0;
  EXPECT_NEAR(mean_strength(b), oracle, 1e-12 * std::abs(oracle));
}

TEST(PriorGeomean, Examples) {
  EXPECT_DOUBLE_EQ(prior_geomean({0.25, 0.25, 0.25}), 0.25);
  EXPECT_DOUBLE_EQ(prior_geomean({1, 1}), 1);
  EXPECT_NEAR(prior_geomean({0.5, 0.125}), std::sqrt(0.0625), 1e-15);
  EXPECT_THROW(prior_geomean({0.5, 0.0}), std::logic_error);
}

// Log-space evaluation agrees with the direct product root for short lists.
TEST(PriorGeomean, LogSpaceMatchesDirectProduct) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int k = 1; k <= 20; ++k) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> p(k);
      double prod = 1;
      for (double& x : p) {
        x = u(gen);
        prod *= x;
      }
      const double direct = std::pow(prod, 1.0 / k);
      EXPECT_NEAR(prior_geomean(p), direct, 1e-10 * direct) << "k=" << k;
    }
  }
}

TEST(LossStat, Examples) {
  const std::vector<PlyLoss> l{{1, 1}, {2, 2}, {3, 3}};
  EXPECT_NEAR(*loss_stat(l, LossStat::kMean, std::nullopt), 2.0, 1e-12);
  EXPECT_NEAR(*loss_stat(l, LossStat::kMedian, std::nullopt), 2.0, 1e-12);
  EXPECT_NEAR(*loss_stat(l, LossStat::kStd, std::nullopt), std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(*loss_stat(l, LossStat::kStd, std::nullopt), 0.816496580927726, 1e-12);
}

TEST(LossStat, CutoffUsesMatchGlobalPly) {
  const std::vector<PlyLoss> l{{40, 0.7}, {60, 2.0}, {120, 5.0}};
  EXPECT_DOUBLE_EQ(*loss_stat(l, LossStat::kMean, 50), 0.7);
  EXPECT_FALSE(loss_stat(l, LossStat::kMean, 30));
  EXPECT_DOUBLE_EQ(*loss_stat({{1, 4}, {2, 1}}, LossStat::kMedian, std::nullopt), 2.5);
}

TEST(LossSelection, NamesRoundTrip) {
  for (const char* s : {"mean@50", "median@inf", "std@100"}) EXPECT_EQ(LossSelection::parse(s).name(), s);
  EXPECT_THROW(LossSelection::parse("mode@5"), ConfigError);
  EXPECT_THROW(LossSelection::parse("mean@0"), ConfigError);
  EXPECT_THROW(LossSelection::parse("mean"), ConfigError);
}

TEST(FeatureConfig, Widths) {
  FeatureConfig only;
  only.include_priors = only.include_loss = false;
  EXPECT_EQ(only.names().size(), 1u);

  FeatureConfig go;
  go.game = Game::kGo;
  for (int i = 0; i < 10; ++i) go.policy_levels.push_back("L" + std::to_string(i));
  go.loss_selected = {LossSelection::parse("mean@100"), LossSelection::parse("median@inf")};
  EXPECT_EQ(go.names().size(), 13u);

  FeatureConfig chess;
  chess.game = Game::kChess;
  for (int i = 0; i < 9; ++i) chess.policy_levels.push_back(std::to_string(1100 + 100 * i));
  chess.loss_selected = {LossSelection::parse("mean@50"), LossSelection::parse("std@50")};
  const auto names = chess.names();
  ASSERT_EQ(names.size(), 12u);
  EXPECT_EQ(names[0], "strength");
  EXPECT_EQ(names[1], "gm:1100");
  EXPECT_EQ(names[11], "loss:std@50");
  EXPECT_NE(chess.schema_id(), go.schema_id());
}

TEST(FeatureConfig, RejectsEmptyAndDuplicateLevels) {
  FeatureConfig none;
  none.include_strength = none.include_priors = none.include_loss = false;
  EXPECT_THROW(none.validate(), ConfigError);
  FeatureConfig dup;
  dup.policy_levels = {"a", "a"};
  EXPECT_THROW(dup.validate(), ConfigError);
}

TEST(AverageFeatures, Examples) {
  const FeatureVector a{{1, 3}, "s"};
  const FeatureVector b{{3, 1}, "s"};
  EXPECT_EQ(average_features({a}).values, a.values);
  EXPECT_EQ(average_features({a, b}).values, (std::vector<double>{2, 2}));
  EXPECT_THROW(average_features({a, FeatureVector{{1, 3}, "other"}}), DomainError);
  EXPECT_THROW(average_features({}), DomainError);
}

TEST(AverageFeatures, MatchesColumnOracleAndIgnoresOrder) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  std::vector<FeatureVector> v(20, FeatureVector{std::vector<double>(6), "s"});
  for (auto& f : v)
    for (double& x : f.values) x = nd(gen);
  const FeatureVector avg = average_features(v);
  for (std::size_t c = 0; c < 6; ++c) {
    std::vector<double> col;
    for (const auto& f : v) col.push_back(f.values[c]);
    const double oracle = testing::compensated_sum(col) / 20.0;
    EXPECT_NEAR(avg.values[c], oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
  }
  std::reverse(v.begin(), v.end());
  EXPECT_EQ(average_features(v).values, avg.values);
}

DataPoint synthetic_point(const std::vector<std::string>& moves) {
  DataPoint dp;
  dp.match_id = "m";
  dp.player_id = "p";
  dp.game = Game::kSynthetic;
  std::string state = "s0";
  for (std::size_t i = 0; i < moves.size(); ++i) {
    dp.moves.push_back({static_cast<int>(2 * i + 1), state, moves[i]});
    state = "s" + std::to_string(i + 1);
  }
  return dp;
}

TEST(MoveLosses, BestMoveAndBlunder) {
  TableBackend b;
  b.value["s0"] = 1.0;
  b.value["s0/best"] = -1.0;  // successor value from the opponent's side
  b.value["s0/blunder"] = 2.0;
  const auto best = move_losses(synthetic_point({"best"}), b, Game::kSynthetic);
  EXPECT_DOUBLE_EQ(best[0].loss, 0.0);
  const auto bad = move_losses(synthetic_point({"blunder"}), b, Game::kSynthetic);
  EXPECT_DOUBLE_EQ(bad[0].loss, 3.0);
  EXPECT_EQ(bad[0].ply, 1);
}

// Ten moves against a random value table; losses equal an independent
// replay of the table differences.
TEST(MoveLosses, ReplayOracle) {
  TableBackend b;
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd;
  std::vector<std::string> moves;
  std::vector<double> expected;
  for (int i = 0; i < 10; ++i) {
    const std::string s = "s" + std::to_string(i);
    const std::string m = "m" + std::to_string(i);
    const double v = nd(gen), w = nd(gen);
    b.value[s] = v;
    b.value[s + "/" + m] = w;
    moves.push_back(m);
    expected.push_back(v + w);
  }
  const auto losses = move_losses(synthetic_point(moves), b, Game::kSynthetic);
  ASSERT_EQ(losses.size(), 10u);
  for (int i = 0; i < 10; ++i) {
    EXPECT_DOUBLE_EQ(losses[i].loss, expected[i]);
    EXPECT_EQ(losses[i].ply, 2 * i + 1);
  }
}

TEST(MoveLosses, ChessValuesUseLogit) {
  TableBackend b;
  const std::string start = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
  const std::string after = "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1";
  b.value[start] = 0.6;
  b.value[after] = 0.5;
  DataPoint dp;
  dp.game = Game::kChess;
  dp.moves.push_back({1, start, "e2e4"});
  const auto l = move_losses(dp, b, Game::kChess);
  EXPECT_NEAR(l[0].loss, logit(0.6) + logit(0.5), 1e-12);
}

struct ExtractFixture : ::testing::Test {
  std::shared_ptr<TableBackend> backend = std::make_shared<TableBackend>();
  BackendSet set;
  FeatureConfig cfg;

  void SetUp() override {
    backend->level_names = {"a", "b"};
    for (int i = 0; i < 3; ++i) {
      const std::string s = "s" + std::to_string(i), m = "m" + std::to_string(i);
      backend->strength[s + "|" + m] = i;
      backend->policy[s + "|" + m + "|a"] = 0.5;
      backend->policy[s + "|" + m + "|b"] = i == 1 ? 0.0 : 0.25;
      backend->value[s] = 0;
      backend->value[s + "/" + m] = i;
    }
    set.game = Game::kSynthetic;
    set.strength = set.policy = set.value = backend;
    cfg.policy_levels = {"a", "b"};
    cfg.loss_selected = {LossSelection::parse("mean@3"), LossSelection::parse("mean@inf")};
  }
};

TEST_F(ExtractFixture, FeatureValuesAndFloor) {
  const auto r = extract_one(synthetic_point({"m0", "m1", "m2"}), set, cfg);
  ASSERT_TRUE(r.record) << r.drop_reason;
  const auto& v = r.record->values;
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v[0], 1.0);
  EXPECT_DOUBLE_EQ(v[1], 0.5);
  const double floored = std::cbrt(0.25 * kPriorFloor * 0.25);
  EXPECT_NEAR(v[2], floored, 1e-12 * floored);
  EXPECT_DOUBLE_EQ(v[3], 0.5);  // plies 1 and 3 survive the cut at 3
  EXPECT_DOUBLE_EQ(v[4], 1.0);
  EXPECT_FALSE(r.record->flagged);
}

TEST_F(ExtractFixture, EmptyCutIsFlaggedAndZero) {
  cfg.loss_selected = {LossSelection::parse("mean@1")};
  DataPoint dp = synthetic_point({"m0"});
  dp.moves[0].ply = 2;
  const auto r = extract_one(dp, set, cfg);
  ASSERT_TRUE(r.record);
  EXPECT_TRUE(r.record->flagged);
  EXPECT_EQ(r.record->values.back(), 0.0);
}

TEST_F(ExtractFixture, BackendFailureDropsThePoint) {
  DataPoint dp = synthetic_point({"m0", "zz"});
  FeatureStore store = extract_features({dp}, set, cfg);
  EXPECT_TRUE(store.records.empty());
  ASSERT_EQ(store.drops.size(), 1u);
  EXPECT_EQ(store.drops[0].match_id, "m");
  EXPECT_NE(store.drops[0].reason.find("strength"), std::string::npos);
}

TEST_F(ExtractFixture, OutOfRangePriorDropsThePoint) {
  backend->policy["s0|m0|a"] = 1.5;
  const auto r = extract_one(synthetic_point({"m0"}), set, cfg);
  EXPECT_FALSE(r.record);
  EXPECT_NE(r.drop_reason.find("outside"), std::string::npos);
}

TEST_F(ExtractFixture, UndeclaredLevelIsAConfigError) {
  cfg.policy_levels = {"a", "zzz"};
  EXPECT_THROW(extract_features({synthetic_point({"m0"})}, set, cfg), ConfigError);
}

TEST_F(ExtractFixture, StoreRoundTripAndProjection) {
  DataPoint a = synthetic_point({"m0", "m1"});
  DataPoint b = synthetic_point({"m2"});
  b.match_id = "a-first";
  b.moves[0].state = "s2";
  b.side = Side::kWhite;
  FeatureStore store = extract_features({a, b}, set, cfg, {true});
  ASSERT_EQ(store.records.size(), 2u);
  EXPECT_EQ(store.records[0].match_id, "a-first");
  std::stringstream ss;
  store.write(ss);
  const FeatureStore back = FeatureStore::read(ss);
  EXPECT_EQ(back.records, store.records);
  EXPECT_EQ(back.schema_id, store.schema_id);
  EXPECT_EQ(back.names, store.names);

  const FeatureStore p = store.project({"gm:b", "strength"});
  EXPECT_EQ(p.names, (std::vector<std::string>{"gm:b", "strength"}));
  EXPECT_EQ(p.records[0].values[1], store.records[0].values[0]);
  EXPECT_THROW(store.project({"nope"}), ConfigError);
}

TEST(FeatureStore, ReadRejectsGarbage) {
  std::stringstream ss("{\"not\":\"a store\"}\n");
  EXPECT_THROW(FeatureStore::read(ss), ParseError);
}

// On synthetic data mean_strength equals the mean chosen-move quality.
TEST(SyntheticExtraction, StrengthIsMeanChosenQuality) {
  SynthConfig c;
  c.seed = 4;
  auto model = std::make_shared<const SynthModel>(c);
  auto backend = std::make_shared<SyntheticBackend>(model);
  BackendSet set{Game::kSynthetic, backend, backend, backend};
  FeatureConfig fc;
  fc.include_priors = fc.include_loss = false;
  const SynthMatch m = gen_match(*model, 3, 0, "t");
  const auto [black, white] = match_datapoints(m);
  const auto r = extract_one(black, set, fc);
  ASSERT_TRUE(r.record);
  std::vector<double> q;
  for (std::size_t i = 0; i < m.plies.size(); i += 2) q.push_back(m.plies[i].quality);
  EXPECT_NEAR(r.record->values[0], testing::compensated_sum(q) / q.size(), 1e-12);
}

}  // namespace
}  // namespace rankforge
