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

#include "rankforge/chess.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace rankforge::chess {

namespace {

constexpr int kKnightSteps[8][2] = {{1, 2}, {2, 1}, {2, -1}, {1, -2},
                                    {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
constexpr int kKingSteps[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1},
                                  {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
constexpr int kBishopDirs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
constexpr int kRookDirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

int file_of(Square s) { return s % 8; }
int rank_of(Square s) { return s / 8; }
bool on_board(int f, int r) { return f >= 0 && f < 8 && r >= 0 && r < 8; }
Square sq(int f, int r) { return r * 8 + f; }

PieceType type_of(std::int8_t p) { return static_cast<PieceType>(std::abs(p)); }
bool is_color(std::int8_t p, Color c) {
  return c == Color::kWhite ? p > 0 : p < 0;
}
std::int8_t make_piece(PieceType t, Color c) {
  const auto v = static_cast<std::int8_t>(t);
  return c == Color::kWhite ? v : static_cast<std::int8_t>(-v);
}

char piece_letter(PieceType t) {
  switch (t) {
    case PieceType::kKnight: return 'N';
    case PieceType::kBishop: return 'B';
    case PieceType::kRook: return 'R';
    case PieceType::kQueen: return 'Q';
    case PieceType::kKing: return 'K';
    default: return 'P';
  }
}

PieceType piece_from_letter(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'N': return PieceType::kKnight;
    case 'B': return PieceType::kBishop;
    case 'R': return PieceType::kRook;
    case 'Q': return PieceType::kQueen;
    case 'K': return PieceType::kKing;
    case 'P': return PieceType::kPawn;
    default: return PieceType::kNone;
  }
}

std::uint8_t castling_mask_for(Square s) {
  switch (s) {
    case 0: return kWhiteQueenside;
    case 7: return kWhiteKingside;
    case 4: return kWhiteKingside | kWhiteQueenside;
    case 56: return kBlackQueenside;
    case 63: return kBlackKingside;
    case 60: return kBlackKingside | kBlackQueenside;
    default: return 0;
  }
}

}  // namespace

std::string square_name(Square s) {
  return {static_cast<char>('a' + file_of(s)), static_cast<char>('1' + rank_of(s))};
}

std::optional<Square> parse_square(std::string_view s) {
  if (s.size() != 2) return std::nullopt;
  const int f = s[0] - 'a';
  const int r = s[1] - '1';
  if (!on_board(f, r)) return std::nullopt;
  return sq(f, r);
}

std::string to_uci(const Move& m) {
  std::string out = square_name(m.from) + square_name(m.to);
  if (m.promotion != PieceType::kNone)
    out += static_cast<char>(std::tolower(piece_letter(m.promotion)));
  return out;
}

Position Position::initial() {
  return *from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
}

std::optional<Position> Position::from_fen(std::string_view fen) {
  std::istringstream in{std::string(fen)};
  std::string placement, side, castling, ep;
  int half = 0, full = 1;
  if (!(in >> placement >> side >> castling >> ep)) return std::nullopt;
  if (!(in >> half)) half = 0;
  if (!(in >> full)) full = 1;

  Position p;
  int rank = 7, file = 0;
  for (char c : placement) {
    if (c == '/') {
      if (file != 8) return std::nullopt;
      --rank;
      file = 0;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      file += c - '0';
    } else {
      const PieceType t = piece_from_letter(c);
      if (t == PieceType::kNone || !on_board(file, rank)) return std::nullopt;
      p.board_[sq(file, rank)] =
          make_piece(t, std::isupper(static_cast<unsigned char>(c)) ? Color::kWhite : Color::kBlack);
      ++file;
    }
    if (file > 8) return std::nullopt;
  }
  if (rank != 0 || file != 8) return std::nullopt;

  if (side == "w") {
    p.side_ = Color::kWhite;
  } else if (side == "b") {
    p.side_ = Color::kBlack;
  } else {
    return std::nullopt;
  }
  if (castling != "-") {
    for (char c : castling) {
      switch (c) {
        case 'K': p.castling_ |= kWhiteKingside; break;
        case 'Q': p.castling_ |= kWhiteQueenside; break;
        case 'k': p.castling_ |= kBlackKingside; break;
        case 'q': p.castling_ |= kBlackQueenside; break;
        default: return std::nullopt;
      }
    }
  }
  if (ep != "-") {
    auto s = parse_square(ep);
    if (!s) return std::nullopt;
    p.ep_square_ = *s;
  }
  p.halfmove_ = half;
  p.fullmove_ = full;
  return p;
}

std::string Position::fen() const {
  std::string out;
  for (int r = 7; r >= 0; --r) {
    int empty = 0;
    for (int f = 0; f < 8; ++f) {
      const std::int8_t pc = board_[sq(f, r)];
      if (pc == 0) {
        ++empty;
        continue;
      }
      if (empty) {
        out += static_cast<char>('0' + empty);
        empty = 0;
      }
      const char l = piece_letter(type_of(pc));
      out += pc > 0 ? l : static_cast<char>(std::tolower(l));
    }
    if (empty) out += static_cast<char>('0' + empty);
    if (r) out += '/';
  }
  out += side_ == Color::kWhite ? " w " : " b ";
  if (castling_ == 0) {
    out += '-';
  } else {
    if (castling_ & kWhiteKingside) out += 'K';
    if (castling_ & kWhiteQueenside) out += 'Q';
    if (castling_ & kBlackKingside) out += 'k';
    if (castling_ & kBlackQueenside) out += 'q';
  }
  out += ' ';
  out += ep_square_ >= 0 ? square_name(ep_square_) : "-";
  out += ' ' + std::to_string(halfmove_) + ' ' + std::to_string(fullmove_);
  return out;
}

Square Position::king_square(Color c) const {
  const std::int8_t k = make_piece(PieceType::kKing, c);
  for (Square s = 0; s < 64; ++s)
    if (board_[s] == k) return s;
  return -1;
}

bool Position::attacked(Square s, Color by) const {
  const int f = file_of(s), r = rank_of(s);
  // Pawns attack diagonally forward from their own perspective.
  const int pawn_rank = by == Color::kWhite ? r - 1 : r + 1;
  for (int df : {-1, 1}) {
    if (on_board(f + df, pawn_rank) &&
        board_[sq(f + df, pawn_rank)] == make_piece(PieceType::kPawn, by))
      return true;
  }
  for (const auto& st : kKnightSteps) {
    if (on_board(f + st[0], r + st[1]) &&
        board_[sq(f + st[0], r + st[1])] == make_piece(PieceType::kKnight, by))
      return true;
  }
  for (const auto& st : kKingSteps) {
    if (on_board(f + st[0], r + st[1]) &&
        board_[sq(f + st[0], r + st[1])] == make_piece(PieceType::kKing, by))
      return true;
  }
  auto slide = [&](const int (*dirs)[2], PieceType a, PieceType b) {
    for (int d = 0; d < 4; ++d) {
      int ff = f + dirs[d][0], rr = r + dirs[d][1];
      while (on_board(ff, rr)) {
        const std::int8_t pc = board_[sq(ff, rr)];
        if (pc != 0) {
          if (is_color(pc, by) && (type_of(pc) == a || type_of(pc) == b)) return true;
          break;
        }
        ff += dirs[d][0];
        rr += dirs[d][1];
      }
    }
    return false;
  };
  return slide(kBishopDirs, PieceType::kBishop, PieceType::kQueen) ||
         slide(kRookDirs, PieceType::kRook, PieceType::kQueen);
}

bool Position::in_check() const {
  const Square k = king_square(side_);
  return k >= 0 && attacked(k, other(side_));
}

void Position::pseudo_legal(std::vector<Move>& out) const {
  const Color us = side_;
  const int forward = us == Color::kWhite ? 1 : -1;
  const int start_rank = us == Color::kWhite ? 1 : 6;
  const int promo_rank = us == Color::kWhite ? 7 : 0;

  auto add_pawn = [&](Square from, Square to) {
    if (rank_of(to) == promo_rank) {
      for (PieceType t : {PieceType::kQueen, PieceType::kRook, PieceType::kBishop,
                          PieceType::kKnight})
        out.push_back({from, to, t});
    } else {
      out.push_back({from, to, PieceType::kNone});
    }
  };

  for (Square s = 0; s < 64; ++s) {
    const std::int8_t pc = board_[s];
    if (pc == 0 || !is_color(pc, us)) continue;
    const int f = file_of(s), r = rank_of(s);
    switch (type_of(pc)) {
      case PieceType::kPawn: {
        if (on_board(f, r + forward) && board_[sq(f, r + forward)] == 0) {
          add_pawn(s, sq(f, r + forward));
          if (r == start_rank && board_[sq(f, r + 2 * forward)] == 0)
            out.push_back({s, sq(f, r + 2 * forward), PieceType::kNone});
        }
        for (int df : {-1, 1}) {
          if (!on_board(f + df, r + forward)) continue;
          const Square t = sq(f + df, r + forward);
          if ((board_[t] != 0 && !is_color(board_[t], us)) || t == ep_square_) add_pawn(s, t);
        }
        break;
      }
      case PieceType::kKnight:
      case PieceType::kKing: {
        const auto& steps = type_of(pc) == PieceType::kKnight ? kKnightSteps : kKingSteps;
        for (const auto& st : steps) {
          if (!on_board(f + st[0], r + st[1])) continue;
          const Square t = sq(f + st[0], r + st[1]);
          if (board_[t] == 0 || !is_color(board_[t], us)) out.push_back({s, t, PieceType::kNone});
        }
        break;
      }
      default: {
        const PieceType t = type_of(pc);
        auto slide = [&](const int (*dirs)[2]) {
          for (int d = 0; d < 4; ++d) {
            int ff = f + dirs[d][0], rr = r + dirs[d][1];
            while (on_board(ff, rr)) {
              const Square to = sq(ff, rr);
              if (board_[to] != 0) {
                if (!is_color(board_[to], us)) out.push_back({s, to, PieceType::kNone});
                break;
              }
              out.push_back({s, to, PieceType::kNone});
              ff += dirs[d][0];
              rr += dirs[d][1];
            }
          }
        };
        if (t == PieceType::kBishop || t == PieceType::kQueen) slide(kBishopDirs);
        if (t == PieceType::kRook || t == PieceType::kQueen) slide(kRookDirs);
        break;
      }
    }
  }

  // Castling: rights, empty path, and no attacked square on the king's path.
  const Color them = other(us);
  const int home = us == Color::kWhite ? 0 : 7;
  const Square king = sq(4, home);
  if (board_[king] != make_piece(PieceType::kKing, us)) return;
  const std::int8_t rook = make_piece(PieceType::kRook, us);
  const std::uint8_t ks = us == Color::kWhite ? kWhiteKingside : kBlackKingside;
  const std::uint8_t qs = us == Color::kWhite ? kWhiteQueenside : kBlackQueenside;
  if ((castling_ & ks) && board_[sq(7, home)] == rook && board_[sq(5, home)] == 0 &&
      board_[sq(6, home)] == 0 && !attacked(king, them) && !attacked(sq(5, home), them) &&
      !attacked(sq(6, home), them))
    out.push_back({king, sq(6, home), PieceType::kNone});
  if ((castling_ & qs) && board_[sq(0, home)] == rook && board_[sq(1, home)] == 0 &&
      board_[sq(2, home)] == 0 && board_[sq(3, home)] == 0 && !attacked(king, them) &&
      !attacked(sq(3, home), them) && !attacked(sq(2, home), them))
    out.push_back({king, sq(2, home), PieceType::kNone});
}

Position Position::after(const Move& m) const {
  Position p = *this;
  const std::int8_t pc = board_[m.from];
  const PieceType t = type_of(pc);
  const bool capture = board_[m.to] != 0;

  p.board_[m.to] = m.promotion != PieceType::kNone ? make_piece(m.promotion, side_) : pc;
  p.board_[m.from] = 0;

  if (t == PieceType::kPawn && m.to == ep_square_ && !capture) {
    const int dir = side_ == Color::kWhite ? -8 : 8;
    p.board_[m.to + dir] = 0;
  }
  if (t == PieceType::kKing && std::abs(file_of(m.to) - file_of(m.from)) == 2) {
    const int home = rank_of(m.from);
    if (file_of(m.to) == 6) {
      p.board_[sq(5, home)] = p.board_[sq(7, home)];
      p.board_[sq(7, home)] = 0;
    } else {
      p.board_[sq(3, home)] = p.board_[sq(0, home)];
      p.board_[sq(0, home)] = 0;
    }
  }

  p.castling_ &= static_cast<std::uint8_t>(~(castling_mask_for(m.from) | castling_mask_for(m.to)));
  p.ep_square_ = -1;
  if (t == PieceType::kPawn && std::abs(m.to - m.from) == 16) p.ep_square_ = (m.to + m.from) / 2;
  p.halfmove_ = (t == PieceType::kPawn || capture) ? 0 : halfmove_ + 1;
  if (side_ == Color::kBlack) ++p.fullmove_;
  p.side_ = other(side_);
  return p;
}

std::vector<Move> Position::legal_moves() const {
  std::vector<Move> pseudo;
  pseudo.reserve(64);
  pseudo_legal(pseudo);
  std::vector<Move> legal;
  legal.reserve(pseudo.size());
  for (const Move& m : pseudo) {
    const Position next = after(m);
    const Square k = next.king_square(side_);
    if (k >= 0 && !next.attacked(k, next.side_)) legal.push_back(m);
  }
  return legal;
}

std::optional<Move> Position::parse_uci(std::string_view uci) const {
  if (uci.size() != 4 && uci.size() != 5) return std::nullopt;
  const auto from = parse_square(uci.substr(0, 2));
  const auto to = parse_square(uci.substr(2, 2));
  if (!from || !to) return std::nullopt;
  PieceType promo = PieceType::kNone;
  if (uci.size() == 5) {
    promo = piece_from_letter(uci[4]);
    if (promo == PieceType::kNone || promo == PieceType::kPawn || promo == PieceType::kKing)
      return std::nullopt;
  }
  const Move m{*from, *to, promo};
  for (const Move& legal : legal_moves())
    if (legal == m) return m;
  return std::nullopt;
}

std::optional<Move> Position::parse_san(std::string_view san) const {
  while (!san.empty() && (san.back() == '+' || san.back() == '#' || san.back() == '!' ||
                          san.back() == '?'))
    san.remove_suffix(1);
  if (san.empty()) return std::nullopt;

  const auto legal = legal_moves();
  if (san == "O-O" || san == "0-0" || san == "O-O-O" || san == "0-0-0") {
    const int home = side_ == Color::kWhite ? 0 : 7;
    const Square to = sq(san.size() == 3 ? 6 : 2, home);
    for (const Move& m : legal)
      if (m.from == sq(4, home) && m.to == to && type_of(board_[m.from]) == PieceType::kKing)
        return m;
    return std::nullopt;
  }

  PieceType promo = PieceType::kNone;
  if (san.size() >= 2) {
    const PieceType t = piece_from_letter(san.back());
    if (t != PieceType::kNone && t != PieceType::kPawn && t != PieceType::kKing &&
        std::isupper(static_cast<unsigned char>(san.back()))) {
      promo = t;
      san.remove_suffix(1);
      if (!san.empty() && san.back() == '=') san.remove_suffix(1);
    }
  }
  if (san.size() < 2) return std::nullopt;
  const auto dest = parse_square(san.substr(san.size() - 2));
  if (!dest) return std::nullopt;
  san.remove_suffix(2);

  PieceType piece = PieceType::kPawn;
  if (!san.empty() && std::isupper(static_cast<unsigned char>(san.front()))) {
    piece = piece_from_letter(san.front());
    if (piece == PieceType::kNone) return std::nullopt;
    san.remove_prefix(1);
  }
  if (!san.empty() && san.back() == 'x') san.remove_suffix(1);
  int from_file = -1, from_rank = -1;
  for (char c : san) {
    if (c >= 'a' && c <= 'h') {
      from_file = c - 'a';
    } else if (c >= '1' && c <= '8') {
      from_rank = c - '1';
    } else {
      return std::nullopt;
    }
  }

  std::optional<Move> found;
  for (const Move& m : legal) {
    if (m.to != *dest || m.promotion != promo) continue;
    if (type_of(board_[m.from]) != piece) continue;
    if (from_file >= 0 && file_of(m.from) != from_file) continue;
    if (from_rank >= 0 && rank_of(m.from) != from_rank) continue;
    if (found) return std::nullopt;  // ambiguous
    found = m;
  }
  return found;
}

std::string Position::san(const Move& m) const {
  const PieceType t = type_of(board_[m.from]);
  std::string out;
  if (t == PieceType::kKing && std::abs(file_of(m.to) - file_of(m.from)) == 2) {
    out = file_of(m.to) == 6 ? "O-O" : "O-O-O";
  } else {
    const bool capture = board_[m.to] != 0 || (t == PieceType::kPawn && m.to == ep_square_);
    if (t == PieceType::kPawn) {
      if (capture) out += static_cast<char>('a' + file_of(m.from));
    } else {
      out += piece_letter(t);
      bool clash = false, same_file = false, same_rank = false;
      for (const Move& o : legal_moves()) {
        if (o.to != m.to || o.from == m.from || type_of(board_[o.from]) != t) continue;
        clash = true;
        same_file |= file_of(o.from) == file_of(m.from);
        same_rank |= rank_of(o.from) == rank_of(m.from);
      }
      if (clash) {
        if (!same_file) {
          out += static_cast<char>('a' + file_of(m.from));
        } else if (!same_rank) {
          out += static_cast<char>('1' + rank_of(m.from));
        } else {
          out += square_name(m.from);
        }
      }
    }
    if (capture) out += 'x';
    out += square_name(m.to);
    if (m.promotion != PieceType::kNone) {
      out += '=';
      out += piece_letter(m.promotion);
    }
  }
  const Position next = after(m);
  if (next.in_check()) out += next.legal_moves().empty() ? '#' : '+';
  return out;
}

std::uint64_t perft(const Position& pos, int depth) {
  if (depth == 0) return 1;
  const auto moves = pos.legal_moves();
  if (depth == 1) return moves.size();
  std::uint64_t n = 0;
  for (const Move& m : moves) n += perft(pos.after(m), depth - 1);
  return n;
}

}  // namespace rankforge::chess
