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
#include <vector>

namespace rankforge::chess {

enum class Color : std::uint8_t { kWhite, kBlack };
enum class PieceType : std::uint8_t { kNone, kPawn, kKnight, kBishop, kRook, kQueen, kKing };

inline Color other(Color c) { return c == Color::kWhite ? Color::kBlack : Color::kWhite; }

// Square index 0 = a1, 7 = h1, 63 = h8.
using Square = int;

std::string square_name(Square s);
std::optional<Square> parse_square(std::string_view s);

struct Move {
  Square from = 0;
  Square to = 0;
  PieceType promotion = PieceType::kNone;

  bool operator==(const Move&) const = default;
};

// Long algebraic "source-destination-promotion" encoding, e.g. e2e4, e7e8q.
std::string to_uci(const Move& m);

enum CastlingRight : std::uint8_t {
  kWhiteKingside = 1,
  kWhiteQueenside = 2,
  kBlackKingside = 4,
  kBlackQueenside = 8,
};

class Position {
 public:
  static Position initial();
  static std::optional<Position> from_fen(std::string_view fen);

  // Standard six-field FEN; the en-passant field is set after every double
  // pawn push.
  std::string fen() const;

  Color side_to_move() const { return side_; }
  int fullmove_number() const { return fullmove_; }

  std::vector<Move> legal_moves() const;
  bool in_check() const;
  bool is_checkmate() const { return in_check() && legal_moves().empty(); }
  bool is_stalemate() const { return !in_check() && legal_moves().empty(); }

  // Applies a move assumed to be legal.
  Position after(const Move& m) const;

  std::optional<Move> parse_uci(std::string_view uci) const;

  // Resolves standard algebraic notation against the legal moves. Returns
  // nullopt when no legal move (or more than one) matches.
  std::optional<Move> parse_san(std::string_view san) const;
  std::string san(const Move& m) const;

  bool operator==(const Position&) const = default;

 private:
  // +type for white, -type for black, 0 for empty.
  std::int8_t at(Square s) const { return board_[s]; }
  bool attacked(Square s, Color by) const;
  Square king_square(Color c) const;
  void pseudo_legal(std::vector<Move>& out) const;

  std::array<std::int8_t, 64> board_{};
  Color side_ = Color::kWhite;
  std::uint8_t castling_ = 0;
  int ep_square_ = -1;
  int halfmove_ = 0;
  int fullmove_ = 1;
};

// Leaf-node count of the legal move tree to `depth`.
std::uint64_t perft(const Position& pos, int depth);

}  // namespace rankforge::chess
