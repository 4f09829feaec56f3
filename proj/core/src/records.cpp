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

#include "rankforge/records.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "rankforge/chess.hpp"
#include "rankforge/error.hpp"
#include "rankforge/goboard.hpp"

namespace rankforge {

std::string to_string(Game g) {
  switch (g) {
    case Game::kGo: return "go";
    case Game::kChess: return "chess";
    case Game::kSynthetic: return "synthetic";
  }
  return "?";
}

std::string to_string(Side s) { return s == Side::kBlack ? "black" : "white"; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kPassPass: return "pass_pass";
    case Termination::kResign: return "resign";
    case Termination::kCheckmate: return "checkmate";
    case Termination::kDraw: return "draw";
    case Termination::kTimeout: return "timeout";
    case Termination::kDisconnect: return "disconnect";
    case Termination::kOther: return "other";
  }
  return "?";
}

std::string to_string(RejectReason r) {
  switch (r) {
    case RejectReason::kMinPlies: return "min_plies";
    case RejectReason::kTermination: return "termination";
    case RejectReason::kCrossGroup: return "cross_group";
    case RejectReason::kUnknownRank: return "unknown_rank";
    case RejectReason::kHandicap: return "handicap";
    case RejectReason::kNotBlitz: return "not_blitz";
    case RejectReason::kDateWindow: return "date_window";
  }
  return "?";
}

Game parse_game(std::string_view s) {
  if (s == "go") return Game::kGo;
  if (s == "chess") return Game::kChess;
  if (s == "synthetic") return Game::kSynthetic;
  throw DomainError("unknown game '" + std::string(s) + "'");
}

Side parse_side(std::string_view s) {
  if (s == "black") return Side::kBlack;
  if (s == "white") return Side::kWhite;
  throw DomainError("unknown side '" + std::string(s) + "'");
}

int group_count(Game g) {
  switch (g) {
    case Game::kGo: return kGoGroups;
    case Game::kChess: return kChessGroups;
    case Game::kSynthetic: break;
  }
  throw DomainError("synthetic group count is configuration dependent");
}

std::string group_label(Game g, int index) {
  if (g == Game::kGo) {
    if (index == 0) return "3-5k";
    if (index == 1) return "1-2k";
    if (index >= 2 && index < kGoGroups) return std::to_string(index - 1) + "d";
  } else if (g == Game::kChess) {
    if (index >= 0 && index < kChessGroups) {
      const int lo = 1000 + 200 * index;
      return "R" + std::to_string(lo) + "-R" + std::to_string(lo + 199);
    }
  } else {
    return "g" + std::to_string(index);
  }
  throw OutOfRangeError("group index " + std::to_string(index) + " out of range");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

RankGroup rank_group_of(std::string_view label, Game game) {
  label = trim(label);
  const std::string original(label);
  if (game == Game::kChess) {
    auto r = parse_int(label);
    if (!r) throw DomainError("chess rating '" + original + "' is not an integer");
    if (*r < 1000 || *r > 2599) throw OutOfRangeError("chess rating " + original + " outside [1000, 2599]");
    const int idx = (*r - 1000) / 200;
    return {game, idx, group_label(game, idx)};
  }
  if (game != Game::kGo) throw DomainError("rank labels only exist for go and chess");

  std::size_t digits = 0;
  while (digits < label.size() && std::isdigit(static_cast<unsigned char>(label[digits]))) ++digits;
  if (digits == 0) throw DomainError("go rank '" + original + "' has no number");
  const int n = *parse_int(label.substr(0, digits));
  const std::string_view unit = trim(label.substr(digits));
  bool kyu = false;
  if (unit == "k" || unit == "K" || unit == "kyu" || unit == "\xe7\xba\xa7" /* 级 */ ||
      unit == "\xe7\xb4\x9a" /* 級 */) {
    kyu = true;
  } else if (unit == "d" || unit == "D" || unit == "dan" || unit == "\xe6\xae\xb5" /* 段 */) {
    kyu = false;
  } else {
    throw DomainError("go rank '" + original + "' has unknown unit");
  }
  int idx = -1;
  if (kyu) {
    if (n >= 3 && n <= 5) idx = 0;
    if (n == 1 || n == 2) idx = 1;
  } else if (n >= 1 && n <= 9) {
    idx = n + 1;
  }
  if (idx < 0) throw OutOfRangeError("go rank '" + original + "' outside 5k..9d");
  return {game, idx, group_label(game, idx)};
}

std::optional<double> estimated_duration_seconds(std::string_view tc) {
  tc = trim(tc);
  const auto plus = tc.find('+');
  if (plus == std::string_view::npos) return std::nullopt;
  auto base = parse_int(tc.substr(0, plus));
  auto inc = parse_int(tc.substr(plus + 1));
  if (!base || !inc || *base < 0 || *inc < 0) return std::nullopt;
  return static_cast<double>(*base) + 40.0 * static_cast<double>(*inc);
}

std::optional<std::string> normalize_date(std::string_view raw) {
  raw = trim(raw);
  if (raw.size() < 10) return std::nullopt;
  raw = raw.substr(0, 10);
  const char sep = raw[4];
  if ((sep != '.' && sep != '-') || raw[7] != sep) return std::nullopt;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (!std::isdigit(static_cast<unsigned char>(raw[i]))) return std::nullopt;
  std::string out(raw);
  out[4] = out[7] = '-';
  return out;
}

FilterDecision filter_match(const MatchRecord& record, const FilterConfig& config) {
  const auto groups = [&]() -> std::optional<std::pair<RankGroup, RankGroup>> {
    try {
      return std::make_pair(rank_group_of(record.black_label, record.game),
                            rank_group_of(record.white_label, record.game));
    } catch (const DomainError&) {
      return std::nullopt;
    }
  };
  const int plies = static_cast<int>(record.plies.size());

  if (record.game == Game::kGo) {
    if (!record.setup_black.empty() || !record.setup_white.empty())
      return FilterDecision::reject(RejectReason::kHandicap, "setup stones present");
    if (auto ha = record.metadata.find("HA"); ha != record.metadata.end()) {
      auto h = parse_int(trim(ha->second));
      if (h && *h > 0) return FilterDecision::reject(RejectReason::kHandicap, "HA[" + ha->second + "]");
    }
    if (plies < config.go_min_plies)
      return FilterDecision::reject(RejectReason::kMinPlies, std::to_string(plies) + " plies");
    if (record.termination != Termination::kPassPass && record.termination != Termination::kResign)
      return FilterDecision::reject(RejectReason::kTermination,
                                    to_string(record.termination) + " (RE[" + record.result + "])");
    auto g = groups();
    if (!g) return FilterDecision::reject(RejectReason::kUnknownRank,
                                          record.black_label + " / " + record.white_label);
    if (g->first.index != g->second.index)
      return FilterDecision::reject(RejectReason::kCrossGroup, g->first.label + " vs " + g->second.label);
    return FilterDecision::accept();
  }

  if (record.game == Game::kChess) {
    if (plies < config.chess_min_plies)
      return FilterDecision::reject(RejectReason::kMinPlies, std::to_string(plies) + " plies");
    const auto duration = estimated_duration_seconds(record.time_control);
    if (!duration || *duration < config.blitz_min_seconds || *duration >= config.blitz_max_seconds)
      return FilterDecision::reject(RejectReason::kNotBlitz, "TimeControl " + record.time_control);
    auto g = groups();
    if (!g) return FilterDecision::reject(RejectReason::kUnknownRank,
                                          record.black_label + " / " + record.white_label);
    if (g->first.index != g->second.index)
      return FilterDecision::reject(RejectReason::kCrossGroup, g->first.label + " vs " + g->second.label);
    if (config.date_from || config.date_to) {
      auto date = normalize_date(record.date);
      if (!date) {
        if (auto utc = record.metadata.find("UTCDate"); utc != record.metadata.end())
          date = normalize_date(utc->second);
      }
      if (!date || (config.date_from && *date < *config.date_from) ||
          (config.date_to && *date > *config.date_to))
        return FilterDecision::reject(RejectReason::kDateWindow, "date " + record.date);
    }
    return FilterDecision::accept();
  }
  throw DomainError("filter_match applies to go and chess records only");
}

std::pair<DataPoint, DataPoint> split_sides(const MatchRecord& record, const std::string& match_id) {
  int group = 0;
  if (record.game == Game::kGo || record.game == Game::kChess) {
    const RankGroup b = rank_group_of(record.black_label, record.game);
    const RankGroup w = rank_group_of(record.white_label, record.game);
    if (b.index != w.index) throw DomainError("split_sides requires both players in one rank group");
    group = b.index;
  }
  DataPoint black, white;
  for (DataPoint* dp : {&black, &white}) {
    dp->match_id = match_id;
    dp->game = record.game;
    dp->group_index = group;
  }
  black.side = Side::kBlack;
  white.side = Side::kWhite;
  black.player_id = record.black_player.empty() ? match_id + ":black" : record.black_player;
  white.player_id = record.white_player.empty() ? match_id + ":white" : record.white_player;
  for (const Ply& p : record.plies) {
    DataPoint& dp = p.mover == Side::kBlack ? black : white;
    dp.moves.push_back({p.index, p.state_before, p.move});
  }
  return {std::move(black), std::move(white)};
}

std::string successor_state(Game game, std::string_view state, std::string_view move) {
  switch (game) {
    case Game::kGo: {
      auto board = go::Board::decode(state);
      auto mv = go::decode_move(move);
      if (!board || !mv) throw DomainError("undecodable go state or move '" + std::string(move) + "'");
      if (!board->play(*mv)) throw DomainError("illegal go move '" + std::string(move) + "'");
      return board->encode();
    }
    case Game::kChess: {
      auto pos = chess::Position::from_fen(state);
      if (!pos) throw DomainError("undecodable FEN '" + std::string(state) + "'");
      auto mv = pos->parse_uci(move);
      if (!mv) throw DomainError("illegal chess move '" + std::string(move) + "'");
      return pos->after(*mv).fen();
    }
    case Game::kSynthetic:
      return std::string(state) + "/" + std::string(move);
  }
  throw DomainError("unknown game");
}

}  // namespace rankforge
