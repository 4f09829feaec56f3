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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rankforge::go {

inline constexpr int kBoardSize = 19;
inline constexpr int kPoints = kBoardSize * kBoardSize;

enum class Stone : std::uint8_t { kEmpty, kBlack, kWhite };

inline Stone opponent(Stone s) { return s == Stone::kBlack ? Stone::kWhite : Stone::kBlack; }

// Board point index, row-major from the top-left corner (SGF orientation).
using Point = int;

// GTP-style coordinates: columns A..T skipping I, rows 1..19 from the bottom.
std::string point_to_gtp(Point p);
std::optional<Point> gtp_to_point(std::string_view s);
// SGF two-letter coordinates, "aa" = top-left.
std::string point_to_sgf(Point p);
std::optional<Point> sgf_to_point(std::string_view s);

// 19x19 position with captures, suicide rejection and simple-ko tracking.
class Board {
 public:
  Board() { cells_.fill(Stone::kEmpty); }

  Stone at(Point p) const { return cells_[p]; }
  Stone to_move() const { return to_move_; }
  std::optional<Point> ko_point() const { return ko_; }

  void place_setup(Point p, Stone s) { cells_[p] = s; }
  void set_to_move(Stone s) { to_move_ = s; }

  // Plays a stone (or a pass when `p` is empty) for the side to move.
  // Returns false and leaves the board unchanged when the move is illegal
  // (occupied point, suicide, or retaking a simple ko).
  bool play(std::optional<Point> p);

  // Canonical text encoding: "go19:<361 cells .XO>:<b|w>:<ko gtp or ->".
  std::string encode() const;
  static std::optional<Board> decode(std::string_view text);

  bool operator==(const Board&) const = default;

 private:
  int liberties_of_group(Point p, std::array<bool, kPoints>& seen, int& size) const;
  void remove_group(Point p);

  std::array<Stone, kPoints> cells_{};
  Stone to_move_ = Stone::kBlack;
  std::optional<Point> ko_;
};

// Canonical move string for a Go move: GTP coordinate or "pass".
std::string encode_move(std::optional<Point> p);
// Parses "pass" or a GTP coordinate; nullopt on bad input.
std::optional<std::optional<Point>> decode_move(std::string_view s);

}  // namespace rankforge::go
