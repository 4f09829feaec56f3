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

#include <set>

#include "rankforge/error.hpp"
#include "rankforge/pgn.hpp"
#include "rankforge/records.hpp"
#include "rankforge/sgf.hpp"
#include "test_support.hpp"

namespace rankforge {
namespace {

TEST(RankGroup, GoKyuBands) {
  EXPECT_EQ(rank_group_of("5k", Game::kGo).index, 0);
  EXPECT_EQ(rank_group_of("3k", Game::kGo).index, 0);
  EXPECT_EQ(rank_group_of("2k", Game::kGo).index, 1);
  EXPECT_EQ(rank_group_of("1k", Game::kGo).index, 1);
  EXPECT_EQ(rank_group_of("2k", Game::kGo).label, "1-2k");
}

TEST(RankGroup, GoDanAndAlternateSpellings) {
  EXPECT_EQ(rank_group_of("1d", Game::kGo).index, 2);
  EXPECT_EQ(rank_group_of("9d", Game::kGo).index, 10);
  EXPECT_EQ(rank_group_of("9d", Game::kGo).label, "9d");
  EXPECT_EQ(rank_group_of("3段", Game::kGo).index, 4);
  EXPECT_EQ(rank_group_of("4级", Game::kGo).index, 0);
  EXPECT_EQ(rank_group_of("2 dan", Game::kGo).index, 3);
}

TEST(RankGroup, GoOutOfRange) {
  EXPECT_THROW(rank_group_of("6k", Game::kGo), OutOfRangeError);
  EXPECT_THROW(rank_group_of("10d", Game::kGo), OutOfRangeError);
  EXPECT_THROW(rank_group_of("pro", Game::kGo), DomainError);
  EXPECT_THROW(rank_group_of("", Game::kGo), DomainError);
}

TEST(RankGroup, ChessBands) {
  EXPECT_EQ(rank_group_of("1000", Game::kChess).index, 0);
  EXPECT_EQ(rank_group_of("1199", Game::kChess).index, 0);
  EXPECT_EQ(rank_group_of("1200", Game::kChess).index, 1);
  EXPECT_EQ(rank_group_of("2599", Game::kChess).index, 7);
  EXPECT_EQ(rank_group_of("2599", Game::kChess).label, "R2400-R2599");
  EXPECT_THROW(rank_group_of("999", Game::kChess), OutOfRangeError);
  EXPECT_THROW(rank_group_of("2600", Game::kChess), OutOfRangeError);
  EXPECT_THROW(rank_group_of("?", Game::kChess), DomainError);
}

TEST(RankGroup, CountsAndLabels) {
  EXPECT_EQ(group_count(Game::kGo), 11);
  EXPECT_EQ(group_count(Game::kChess), 8);
  EXPECT_EQ(group_label(Game::kGo, 0), "3-5k");
  EXPECT_EQ(group_label(Game::kChess, 2), "R1400-R1599");
}

TEST(TimeControl, EstimatedDuration) {
  EXPECT_DOUBLE_EQ(*estimated_duration_seconds("180+0"), 180);
  EXPECT_DOUBLE_EQ(*estimated_duration_seconds("300+3"), 420);
  EXPECT_FALSE(estimated_duration_seconds("-"));
  EXPECT_FALSE(estimated_duration_seconds("abc"));
}

TEST(Dates, Normalize) {
  EXPECT_EQ(*normalize_date("2024.02.15"), "2024-02-15");
  EXPECT_EQ(*normalize_date("2024-02-15"), "2024-02-15");
  EXPECT_EQ(*normalize_date("2017-03-01,02"), "2017-03-01");
  EXPECT_FALSE(normalize_date("????.??.??"));
}

MatchRecord go_record(int plies, const std::string& black, const std::string& white, Termination t) {
  MatchRecord r;
  r.game = Game::kGo;
  r.black_label = black;
  r.white_label = white;
  r.termination = t;
  for (int i = 1; i <= plies; ++i)
    r.plies.push_back({i, i % 2 ? Side::kBlack : Side::kWhite, "pass", "s" + std::to_string(i)});
  return r;
}

TEST(Filter, GoMinPlies) {
  auto d = filter_match(go_record(49, "5d", "5d", Termination::kResign));
  EXPECT_FALSE(d.accepted);
  EXPECT_EQ(*d.reason, RejectReason::kMinPlies);
}

TEST(Filter, GoResignAccepted) {
  EXPECT_TRUE(filter_match(go_record(120, "3d", "3d", Termination::kResign)).accepted);
}

TEST(Filter, ChessCrossGroup) {
  MatchRecord r;
  r.game = Game::kChess;
  r.white_label = "1500";
  r.black_label = "1750";
  r.time_control = "180+0";
  for (int i = 1; i <= 40; ++i) r.plies.push_back({i, i % 2 ? Side::kWhite : Side::kBlack, "e2e4", "x"});
  auto d = filter_match(r);
  EXPECT_FALSE(d.accepted);
  EXPECT_EQ(*d.reason, RejectReason::kCrossGroup);
}

TEST(Filter, SyntheticRecordsAreNotFiltered) {
  MatchRecord r;
  r.game = Game::kSynthetic;
  EXPECT_THROW(filter_match(r), DomainError);
}

// Every labeled fixture file yields the recorded decision, and every
// criterion in the table is exercised by at least one accept and one reject.
TEST(Filter, HandLabeledTable) {
  FilterConfig cfg;
  cfg.date_from = "2024-02-01";
  cfg.date_to = "2024-02-29";
  std::istringstream table(testing::read_text(testing::fixture_path("filter_labels.csv")));
  std::string line;
  std::getline(table, line);
  std::map<std::string, std::set<std::string>> outcomes;
  int rows = 0;
  while (std::getline(table, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const std::string file = line.substr(0, c1);
    const std::string expected = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string criterion = line.substr(c2 + 1);
    const std::string text = testing::read_text(testing::fixture_path("filter/" + file));
    const MatchRecord rec = file.ends_with(".sgf") ? parse_sgf(text) : parse_pgn(text);
    const FilterDecision d = filter_match(rec, cfg);
    const std::string got = d.accepted ? "accept" : to_string(*d.reason);
    EXPECT_EQ(got, expected) << file << ": " << d.detail;
    outcomes[criterion].insert(expected == "accept" ? "accept" : "reject");
    ++rows;
  }
  EXPECT_GE(rows, 30);
  for (const auto& [criterion, kinds] : outcomes) {
    if (criterion == "go_even_game" || criterion == "go_rank_mapping" || criterion == "chess_rank_mapping")
      EXPECT_TRUE(kinds.count("reject")) << criterion;
    else
      EXPECT_EQ(kinds.size(), 2u) << criterion;
  }
}

TEST(SplitSides, FourPlies) {
  auto r = go_record(4, "3d", "3d", Termination::kResign);
  auto [b, w] = split_sides(r, "m1");
  ASSERT_EQ(b.k(), 2u);
  ASSERT_EQ(w.k(), 2u);
  EXPECT_EQ(b.moves[0].ply, 1);
  EXPECT_EQ(b.moves[1].ply, 3);
  EXPECT_EQ(w.moves[0].ply, 2);
  EXPECT_EQ(w.moves[1].ply, 4);
  EXPECT_EQ(b.player_id, "m1:black");
  EXPECT_EQ(b.group_index, 4);
}

TEST(SplitSides, OddPlyCount) {
  auto [b, w] = split_sides(go_record(51, "1k", "2k", Termination::kResign), "m");
  EXPECT_EQ(b.k(), 26u);
  EXPECT_EQ(w.k(), 25u);
}

TEST(SplitSides, CorpusIndicesPartitionThePlies) {
  for (const auto& path : testing::list_files(testing::fixture_path("sgf"), ".sgf")) {
    MatchRecord rec = parse_sgf(testing::read_text(path.string()));
    rec.black_label = rec.white_label = "1d";
    auto [b, w] = split_sides(rec, path.filename().string());
    std::vector<int> seen;
    for (const auto& m : b.moves) seen.push_back(m.ply);
    for (const auto& m : w.moves) seen.push_back(m.ply);
    std::sort(seen.begin(), seen.end());
    ASSERT_EQ(seen.size(), rec.plies.size()) << path;
    for (std::size_t i = 0; i < seen.size(); ++i) ASSERT_EQ(seen[i], static_cast<int>(i + 1)) << path;
  }
}

TEST(Successor, SyntheticStatesAppendTheMove) {
  EXPECT_EQ(successor_state(Game::kSynthetic, "syn:00ff", "m3"), "syn:00ff/m3");
}

TEST(Successor, ChessAdvancesTheFen) {
  EXPECT_EQ(successor_state(Game::kChess, "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1", "e2e4"),
            "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1");
}

}  // namespace
}  // namespace rankforge
