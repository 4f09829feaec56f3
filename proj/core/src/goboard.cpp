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

#include "rankforge/goboard.hpp"

#include <cctype>
#include <vector>

namespace rankforge::go {

namespace {

constexpr std::string_view kGtpColumns = "ABCDEFGHJKLMNOPQRST";

template <typename F>
void for_each_neighbor(Point p, F&& f) {
  const int r = p / kBoardSize;
  const int c = p % kBoardSize;
  if (r > 0) f(p - kBoardSize);
  if (r + 1 < kBoardSize) f(p + kBoardSize);
  if (c > 0) f(p - 1);
  if (c + 1 < kBoardSize) f(p + 1);
}

}  // namespace

std::string point_to_gtp(Point p) {
  const int r = p / kBoardSize;
  const int c = p % kBoardSize;
  return std::string(1, kGtpColumns[c]) + std::to_string(kBoardSize - r);
}

std::optional<Point> gtp_to_point(std::string_view s) {
  if (s.size() < 2 || s.size() > 3) return std::nullopt;
  const char col = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  const auto c = kGtpColumns.find(col);
  if (c == std::string_view::npos) return std::nullopt;
  int row = 0;
  for (char ch : s.substr(1)) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
    row = row * 10 + (ch - '0');
  }
  if (row < 1 || row > kBoardSize) return std::nullopt;
  return (kBoardSize - row) * kBoardSize + static_cast<int>(c);
}

std::string point_to_sgf(Point p) {
  const int r = p / kBoardSize;
  const int c = p % kBoardSize;
  return {static_cast<char>('a' + c), static_cast<char>('a' + r)};
}

std::optional<Point> sgf_to_point(std::string_view s) {
  if (s.size() != 2) return std::nullopt;
  const int c = s[0] - 'a';
  const int r = s[1] - 'a';
  if (c < 0 || c >= kBoardSize || r < 0 || r >= kBoardSize) return std::nullopt;
  return r * kBoardSize + c;
}

int Board::liberties_of_group(Point p, std::array<bool, kPoints>& seen, int& size) const {
  const Stone color = cells_[p];
  std::array<bool, kPoints> lib_seen{};
  int libs = 0;
  size = 0;
  std::vector<Point> stack{p};
  seen[p] = true;
  while (!stack.empty()) {
    const Point q = stack.back();
    stack.pop_back();
    ++size;
    for_each_neighbor(q, [&](Point n) {
      if (cells_[n] == Stone::kEmpty) {
        if (!lib_seen[n]) {
          lib_seen[n] = true;
          ++libs;
        }
      } else if (cells_[n] == color && !seen[n]) {
        seen[n] = true;
        stack.push_back(n);
      }
    });
  }
  return libs;
}

void Board::remove_group(Point p) {
  const Stone color = cells_[p];
  std::vector<Point> stack{p};
  cells_[p] = Stone::kEmpty;
  while (!stack.empty()) {
    const Point q = stack.back();
    stack.pop_back();
    for_each_neighbor(q, [&](Point n) {
      if (cells_[n] == color) {
        cells_[n] = Stone::kEmpty;
        stack.push_back(n);
      }
    });
  }
}

bool Board::play(std::optional<Point> p) {
  if (!p) {
    ko_.reset();
    to_move_ = opponent(to_move_);
    return true;
  }
  const Point pt = *p;
  if (cells_[pt] != Stone::kEmpty) return false;
  if (ko_ && *ko_ == pt) return false;

  Board next = *this;
  const Stone me = to_move_;
  const Stone them = opponent(me);
  next.cells_[pt] = me;

  int captured = 0;
  Point last_captured = -1;
  for_each_neighbor(pt, [&](Point n) {
    if (next.cells_[n] != them) return;
    std::array<bool, kPoints> seen{};
    int size = 0;
    if (next.liberties_of_group(n, seen, size) == 0) {
      captured += size;
      last_captured = n;
      next.remove_group(n);
    }
  });

  std::array<bool, kPoints> seen{};
  int own_size = 0;
  const int own_libs = next.liberties_of_group(pt, seen, own_size);
  if (own_libs == 0) return false;  // suicide

  next.ko_.reset();
  if (captured == 1 && own_size == 1 && own_libs == 1) next.ko_ = last_captured;
  next.to_move_ = them;
  *this = next;
  return true;
}

std::string Board::encode() const {
  std::string out = "go19:";
  out.reserve(5 + kPoints + 8);
  for (Stone s : cells_) out += s == Stone::kEmpty ? '.' : s == Stone::kBlack ? 'X' : 'O';
  out += to_move_ == Stone::kBlack ? ":b:" : ":w:";
  out += ko_ ? point_to_gtp(*ko_) : "-";
  return out;
}

std::optional<Board> Board::decode(std::string_view text) {
  constexpr std::string_view kPrefix = "go19:";
  if (text.substr(0, kPrefix.size()) != kPrefix) return std::nullopt;
  text.remove_prefix(kPrefix.size());
  if (text.size() < kPoints + 4) return std::nullopt;
  Board b;
  for (int i = 0; i < kPoints; ++i) {
    switch (text[i]) {
      case '.': b.cells_[i] = Stone::kEmpty; break;
      case 'X': b.cells_[i] = Stone::kBlack; break;
      case 'O': b.cells_[i] = Stone::kWhite; break;
      default: return std::nullopt;
    }
  }
  text.remove_prefix(kPoints);
  if (text[0] != ':' || text[2] != ':') return std::nullopt;
  if (text[1] == 'b') {
    b.to_move_ = Stone::kBlack;
  } else if (text[1] == 'w') {
    b.to_move_ = Stone::kWhite;
  } else {
    return std::nullopt;
  }
  const std::string_view ko = text.substr(3);
  if (ko != "-") {
    auto p = gtp_to_point(ko);
    if (!p) return std::nullopt;
    b.ko_ = *p;
  }
  return b;
}

std::string encode_move(std::optional<Point> p) { return p ? point_to_gtp(*p) : "pass"; }

std::optional<std::optional<Point>> decode_move(std::string_view s) {
  if (s == "pass") return std::optional<Point>{};
  auto p = gtp_to_point(s);
  if (!p) return std::nullopt;
  return std::optional<Point>{*p};
}

}  // namespace rankforge::go
