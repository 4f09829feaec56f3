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

#include <memory>
#include <string>

#include "rankforge/backends.hpp"
#include "rankforge/error.hpp"
#include "rankforge/features.hpp"
#include "rankforge/pipeline.hpp"
#include "rankforge/synthlab.hpp"
#include "test_support.hpp"

namespace rankforge {
namespace {

constexpr const char* kSmallRun =
    "seed = 77\n"
    "game = \"synthetic\"\n"
    "[synth]\n"
    "groups = 3\n"
    "moves_per_state = 6\n"
    "plies_per_match = 16\n"
    "[data]\n"
    "train_matches_per_group = 3\n"
    "test_matches_per_group = 2\n"
    "[features]\n"
    "loss = [\"mean@inf\", \"std@8\"]\n";

class ProtocolTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_file_ = dir_.file("run.toml");
    testing::write_text(config_file_, kSmallRun);
    run_ = RunConfig::from_config(Config::parse(kSmallRun));
    points_ = synthetic_split(run_, true);
  }

  std::string mock(const std::string& flags) const {
    return std::string("'") + RANKFORGE_MOCK_BACKEND + "' --config '" + config_file_ + "' " + flags;
  }

  // All three roles served by one child process launched with `flags`.
  FeatureStore extract_via(const std::string& flags, double timeout = 30.0) const {
    Config c = Config::parse(kSmallRun);
    const std::string cmd = mock(flags);
    for (const char* role : {"strength", "policy", "value"})
      c.set(std::string("backends.") + role, ConfigValue{ConfigValue::Scalar{cmd}});
    c.set("backends.timeout", ConfigValue{ConfigValue::Scalar{timeout}});
    const RunConfig run = RunConfig::from_config(c);
    BackendSet set = make_backends(run);
    EXPECT_EQ(set.strength.get(), set.value.get());
    return extract_features(points_, set, run.features);
  }

  FeatureStore extract_in_process() const {
    BackendSet set = make_backends(run_);
    return extract_features(points_, set, run_.features);
  }

  testing::ScratchDir dir_{"protocol"};
  std::string config_file_;
  RunConfig run_;
  std::vector<DataPoint> points_;
};

TEST_F(ProtocolTest, InOrderChildMatchesInProcessBackend) {
  const FeatureStore ref = extract_in_process();
  ASSERT_EQ(ref.records.size(), points_.size());
  const FeatureStore sub = extract_via("");
  EXPECT_TRUE(sub.drops.empty());
  EXPECT_EQ(sub.records, ref.records);
  EXPECT_EQ(sub.schema_id, ref.schema_id);
}

TEST_F(ProtocolTest, OutOfOrderAnswersGiveIdenticalStores) {
  const FeatureStore ref = extract_via("");
  const FeatureStore reversed = extract_via("--reverse");
  const FeatureStore shuffled = extract_via("--shuffle-seed 12345");
  EXPECT_EQ(reversed.records, ref.records);
  EXPECT_EQ(shuffled.records, ref.records);
  EXPECT_TRUE(reversed.drops.empty());
  EXPECT_TRUE(shuffled.drops.empty());
}

TEST_F(ProtocolTest, TimeoutDropsExactlyTheAffectedDataPoints) {
  const FeatureStore ref = extract_via("");
  const DataPoint& a = points_[3];
  const DataPoint& b = points_[8];
  const FeatureStore hung =
      extract_via("--hang-on '" + a.moves[2].state + "' --hang-on '" + b.moves[0].state + "'", 0.5);
  ASSERT_EQ(hung.drops.size(), 2u);
  std::vector<std::pair<std::string, Side>> dropped;
  for (const auto& d : hung.drops) {
    dropped.emplace_back(d.match_id, d.side);
    EXPECT_NE(d.reason.find("timeout"), std::string::npos) << d.reason;
  }
  std::vector<std::pair<std::string, Side>> expected{{a.match_id, a.side}, {b.match_id, b.side}};
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(dropped, expected);

  std::vector<FeatureRecord> survivors;
  for (const auto& r : ref.records)
    if (!((r.match_id == a.match_id && r.side == a.side) || (r.match_id == b.match_id && r.side == b.side)))
      survivors.push_back(r);
  EXPECT_EQ(hung.records, survivors);

  const std::string csv = dir_.file("drops.csv");
  hung.write_drops_csv(csv);
  const std::string text = testing::read_text(csv);
  EXPECT_NE(text.find(a.match_id + "," + to_string(a.side) + "," + a.player_id), std::string::npos) << text;
  EXPECT_NE(text.find(b.match_id + "," + to_string(b.side) + "," + b.player_id), std::string::npos) << text;
}

TEST_F(ProtocolTest, ErrorAnswersBecomeNamedDrops) {
  const DataPoint& a = points_[5];
  const FeatureStore s = extract_via("--error-on '" + a.moves[1].state + "'");
  ASSERT_EQ(s.drops.size(), 1u);
  EXPECT_EQ(s.drops[0].match_id, a.match_id);
  EXPECT_EQ(s.drops[0].side, a.side);
  EXPECT_EQ(s.drops[0].player_id, a.player_id);
  EXPECT_NE(s.drops[0].reason.find("refused"), std::string::npos) << s.drops[0].reason;
  EXPECT_EQ(s.records.size(), points_.size() - 1);
}

TEST(SubprocessBackend, MalformedResponseLineIsABackendError) {
  SubprocessBackend b("read line; echo 'this is not json'; sleep 5", "bad", {}, 5.0);
  EXPECT_THROW(b.evaluate({{EvalKind::kValue, "s", std::nullopt, std::nullopt}}), BackendError);
}

TEST(SubprocessBackend, ChildExitFailsOutstandingRequests) {
  SubprocessBackend b("exit 0", "gone", {}, 5.0);
  const std::vector<EvalQuery> qs(4, EvalQuery{EvalKind::kValue, "s", std::nullopt, std::nullopt});
  const auto out = b.evaluate(qs);
  ASSERT_EQ(out.size(), 4u);
  for (const auto& o : out) EXPECT_FALSE(o.ok());
}

TEST(SubprocessBackend, SilentChildTimesOut) {
  SubprocessBackend b("cat > /dev/null", "silent", {}, 0.3);
  const std::vector<EvalQuery> qs(3, EvalQuery{EvalKind::kValue, "s", std::nullopt, std::nullopt});
  const auto out = b.evaluate(qs);
  for (const auto& o : out) {
    EXPECT_FALSE(o.ok());
    EXPECT_NE(o.error.find("timeout"), std::string::npos);
  }
  EXPECT_EQ(b.timeouts(), 3u);
}

TEST(SubprocessBackend, UnknownAndDuplicateIdsAreIgnored) {
  // Answers id 999 (unknown), then the real id twice; the first real answer wins.
  const std::string script =
      "read line; id=$(echo \"$line\" | sed 's/.*\"id\":\\([0-9]*\\).*/\\1/'); "
      "echo '{\"id\":999,\"value\":5}'; echo \"{\\\"id\\\":$id,\\\"value\\\":0.25}\"; "
      "echo \"{\\\"id\\\":$id,\\\"value\\\":0.75}\"; sleep 5";
  SubprocessBackend b(script, "scripted", {}, 5.0);
  const auto out = b.evaluate({{EvalKind::kValue, "s", std::nullopt, std::nullopt}});
  ASSERT_TRUE(out[0].ok()) << out[0].error;
  EXPECT_EQ(*out[0].value, 0.25);
}

TEST(MockBackend, UniformPolicyOverLegalMoves) {
  SubprocessBackend b(std::string("'") + RANKFORGE_MOCK_BACKEND + "' --uniform", "uniform", {"any"}, 10.0);
  const std::string start = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
  const auto out = b.evaluate({{EvalKind::kPolicy, start, "e2e4", "any"},
                               {EvalKind::kValue, start, std::nullopt, std::nullopt},
                               {EvalKind::kStrength, start, "e2e4", std::nullopt}});
  ASSERT_TRUE(out[0].ok());
  EXPECT_DOUBLE_EQ(*out[0].value, 1.0 / 20);
  EXPECT_EQ(*out[1].value, 0.5);
  EXPECT_EQ(*out[2].value, 0.0);
}

}  // namespace
}  // namespace rankforge
