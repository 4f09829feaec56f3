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

// Match records, rank groups, selection criteria and per-player data points.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rankforge {

enum class Game { kGo, kChess, kSynthetic };
enum class Side { kBlack, kWhite };
enum class Termination { kPassPass, kResign, kCheckmate, kDraw, kTimeout, kDisconnect, kOther };

std::string to_string(Game g);
std::string to_string(Side s);
std::string to_string(Termination t);
Game parse_game(std::string_view s);
Side parse_side(std::string_view s);

struct Ply {
  int index = 0;  // 1-based
  Side mover = Side::kBlack;
  std::string move;          // GTP coordinate / "pass" (Go), UCI (chess)
  std::string state_before;  // canonical position encoding

  bool operator==(const Ply&) const = default;
};

struct MatchRecord {
  Game game = Game::kGo;
  std::vector<Ply> plies;
  std::string black_label;
  std::string white_label;
  std::string black_player;
  std::string white_player;
  Termination termination = Termination::kOther;
  std::string result;        // raw RE / Result value
  std::string date;          // raw DT / Date value
  std::string time_control;  // chess TimeControl tag
  std::vector<std::string> setup_black;  // Go setup stones (AB), GTP coordinates
  std::vector<std::string> setup_white;  // Go setup stones (AW)
  std::map<std::string, std::string> metadata;  // every other root property / tag

  bool operator==(const MatchRecord&) const = default;
};

struct RankGroup {
  Game game = Game::kGo;
  int index = 0;  // 0 = weakest
  std::string label;

  bool operator==(const RankGroup&) const = default;
};

inline constexpr int kGoGroups = 11;
inline constexpr int kChessGroups = 8;

int group_count(Game g);
std::string group_label(Game g, int index);

// Go: "3k".."5k" -> 0, "1k"/"2k" -> 1, "1d".."9d" -> 2..10 (also accepts
// 级/段 suffixes). Chess: integer rating r in [1000, 2599] -> (r-1000)/200.
// Throws OutOfRangeError for ranks outside the covered range and DomainError
// for labels that are not ranks at all.
RankGroup rank_group_of(std::string_view label, Game game);

enum class RejectReason {
  kMinPlies,
  kTermination,
  kCrossGroup,
  kUnknownRank,
  kHandicap,
  kNotBlitz,
  kDateWindow,
};

std::string to_string(RejectReason r);

struct FilterConfig {
  int go_min_plies = 50;
  int chess_min_plies = 20;
  // Blitz when base + 40 * increment falls in [min, max) seconds.
  double blitz_min_seconds = 180;
  double blitz_max_seconds = 480;
  // Inclusive ISO dates (YYYY-MM-DD); unset means unbounded.
  std::optional<std::string> date_from;
  std::optional<std::string> date_to;
};

struct FilterDecision {
  bool accepted = false;
  std::optional<RejectReason> reason;
  std::string detail;

  static FilterDecision accept() { return {true, std::nullopt, {}}; }
  static FilterDecision reject(RejectReason r, std::string detail = {}) {
    return {false, r, std::move(detail)};
  }
};

FilterDecision filter_match(const MatchRecord& record, const FilterConfig& config = {});

// Estimated blitz duration from a "base+increment" TimeControl value; nullopt
// for "-" or unparseable values.
std::optional<double> estimated_duration_seconds(std::string_view time_control);

// Normalizes "2024.02.15", "2024-02-15" or "2017-03-01,02" to "YYYY-MM-DD".
std::optional<std::string> normalize_date(std::string_view raw);

struct MoveEntry {
  int ply = 0;
  std::string state;
  std::string move;

  bool operator==(const MoveEntry&) const = default;
};

struct DataPoint {
  std::string match_id;
  std::string player_id;
  Side side = Side::kBlack;
  Game game = Game::kGo;
  int group_index = 0;
  std::vector<MoveEntry> moves;

  std::size_t k() const { return moves.size(); }
  bool operator==(const DataPoint&) const = default;
};

// Splits an accepted record into (black, white) data points. Each keeps the
// match-global ply indices of its own moves.
std::pair<DataPoint, DataPoint> split_sides(const MatchRecord& record, const std::string& match_id);

// Position after `move` is played in `state`. Synthetic states are opaque
// keys; their successor is "<state>/<move>".
std::string successor_state(Game game, std::string_view state, std::string_view move);

}  // namespace rankforge
