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

#include "rankforge/pgn.hpp"

#include <cctype>

#include "rankforge/chess.hpp"
#include "rankforge/error.hpp"

namespace rankforge {

namespace {

bool is_result_token(std::string_view t) {
  return t == "1-0" || t == "0-1" || t == "1/2-1/2" || t == "*";
}

Termination chess_termination(const std::string& tag, const std::string& result,
                              const chess::Position& final_pos) {
  if (tag == "Time forfeit") return Termination::kTimeout;
  if (tag == "Abandoned") return Termination::kDisconnect;
  if (!tag.empty() && tag != "Normal") return Termination::kOther;
  if (result == "1/2-1/2") return Termination::kDraw;
  if (result == "1-0" || result == "0-1")
    return final_pos.is_checkmate() ? Termination::kCheckmate : Termination::kResign;
  return Termination::kOther;
}

std::string escape_tag(std::string_view v) {
  std::string out;
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

MatchRecord parse_pgn(std::string_view text) {
  MatchRecord rec;
  rec.game = Game::kChess;
  std::map<std::string, std::string> tags;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto skip_ws = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };

  // Tag pairs.
  while (true) {
    skip_ws();
    if (i < n && text[i] == '%') {  // escape line
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (i >= n || text[i] != '[') break;
    const std::size_t start = i++;
    skip_ws();
    std::string name;
    while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) name += text[i++];
    skip_ws();
    if (name.empty() || i >= n || text[i] != '"') throw ParseError("malformed tag pair", start);
    ++i;
    std::string value;
    while (true) {
      if (i >= n) throw ParseError("unterminated tag value", start);
      char c = text[i++];
      if (c == '"') break;
      if (c == '\\' && i < n) c = text[i++];
      value += c;
    }
    skip_ws();
    if (i >= n || text[i] != ']') throw ParseError("tag pair missing ']'", start);
    ++i;
    tags[name] = value;
  }

  auto take = [&](const char* key) -> std::string {
    auto it = tags.find(key);
    if (it == tags.end()) return {};
    std::string v = it->second;
    tags.erase(it);
    return v;
  };
  rec.white_player = take("White");
  rec.black_player = take("Black");
  rec.white_label = take("WhiteElo");
  rec.black_label = take("BlackElo");
  rec.time_control = take("TimeControl");
  rec.date = take("Date");
  rec.result = take("Result");
  const std::string termination_tag = take("Termination");
  const std::string fen = take("FEN");
  tags.erase("SetUp");
  rec.metadata = std::move(tags);

  chess::Position pos = chess::Position::initial();
  if (!fen.empty()) {
    auto p = chess::Position::from_fen(fen);
    if (!p) throw ParseError("bad FEN tag '" + fen + "'", 0);
    pos = *p;
    rec.metadata["FEN"] = fen;
  }

  // Movetext.
  int ply = 0;
  std::string game_result;
  while (i < n) {
    skip_ws();
    if (i >= n) break;
    const char c = text[i];
    if (c == '{') {
      const std::size_t start = i;
      while (i < n && text[i] != '}') ++i;
      if (i >= n) throw ParseError("unterminated comment", start);
      ++i;
      continue;
    }
    if (c == ';') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == '(') {
      const std::size_t start = i;
      int depth = 0;
      do {
        if (text[i] == '(') ++depth;
        if (text[i] == ')') --depth;
        if (text[i] == '{') {
          while (i < n && text[i] != '}') ++i;
          if (i >= n) break;
        }
        ++i;
      } while (i < n && depth > 0);
      if (depth > 0) throw ParseError("unterminated variation", start);
      continue;
    }
    if (c == '[') break;  // start of the next game
    const std::size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '{' &&
           text[i] != '(' && text[i] != ')' && text[i] != ';')
      ++i;
    std::string_view tok = text.substr(start, i - start);
    if (tok.empty()) {
      throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    if (tok[0] == '$') continue;
    if (is_result_token(tok)) {
      game_result = std::string(tok);
      break;
    }
    // Strip a leading move number ("12." / "12..." / "12...e5").
    std::size_t d = 0;
    while (d < tok.size() && std::isdigit(static_cast<unsigned char>(tok[d]))) ++d;
    if (d > 0 && d < tok.size() && tok[d] == '.') {
      while (d < tok.size() && tok[d] == '.') ++d;
      tok.remove_prefix(d);
      if (tok.empty()) continue;
    } else if (d == tok.size()) {
      continue;  // bare number
    }
    const int move_number = pos.fullmove_number();
    const bool white = pos.side_to_move() == chess::Color::kWhite;
    auto mv = pos.parse_san(tok);
    if (!mv)
      throw ParseError("illegal or ambiguous move " + std::to_string(move_number) + (white ? ". " : "... ") +
                           std::string(tok),
                       start);
    Ply p;
    p.index = ++ply;
    p.mover = white ? Side::kWhite : Side::kBlack;
    p.move = chess::to_uci(*mv);
    p.state_before = pos.fen();
    rec.plies.push_back(std::move(p));
    pos = pos.after(*mv);
  }
  if (rec.result.empty()) rec.result = game_result;
  rec.termination = chess_termination(termination_tag, rec.result, pos);
  if (!termination_tag.empty()) rec.metadata["Termination"] = termination_tag;
  return rec;
}

std::string serialize_pgn(const MatchRecord& record) {
  std::string out;
  auto tag = [&](const std::string& name, const std::string& value) {
    out += "[" + name + " \"" + escape_tag(value) + "\"]\n";
  };
  tag("White", record.white_player);
  tag("Black", record.black_player);
  tag("Result", record.result.empty() ? "*" : record.result);
  if (!record.date.empty()) tag("Date", record.date);
  if (!record.white_label.empty()) tag("WhiteElo", record.white_label);
  if (!record.black_label.empty()) tag("BlackElo", record.black_label);
  if (!record.time_control.empty()) tag("TimeControl", record.time_control);
  chess::Position pos = chess::Position::initial();
  for (const auto& [k, v] : record.metadata) {
    if (k == "FEN") {
      tag("SetUp", "1");
      pos = *chess::Position::from_fen(v);
    }
    tag(k, v);
  }
  out += '\n';
  std::string line;
  for (const Ply& p : record.plies) {
    std::string piece;
    if (pos.side_to_move() == chess::Color::kWhite || &p == &record.plies.front())
      piece = std::to_string(pos.fullmove_number()) +
              (pos.side_to_move() == chess::Color::kWhite ? ". " : "... ");
    auto mv = pos.parse_uci(p.move);
    if (!mv) throw DomainError("record holds illegal move " + p.move);
    piece += pos.san(*mv);
    pos = pos.after(*mv);
    if (line.size() + piece.size() + 1 > 79) {
      out += line + '\n';
      line.clear();
    }
    if (!line.empty()) line += ' ';
    line += piece;
  }
  const std::string result = record.result.empty() ? "*" : record.result;
  if (line.size() + result.size() + 1 > 79) {
    out += line + '\n';
    line.clear();
  }
  if (!line.empty()) line += ' ';
  out += line + result + "\n";
  return out;
}

std::vector<std::string> split_pgn_games(std::string_view text) {
  // A new game begins at a tag line that follows movetext.
  std::vector<std::string> games;
  std::string current;
  bool seen_moves = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    std::size_t f = 0;
    while (f < line.size() && std::isspace(static_cast<unsigned char>(line[f]))) ++f;
    const bool blank = f == line.size();
    const bool is_tag = !blank && line[f] == '[';
    if (is_tag && seen_moves) {
      games.push_back(std::move(current));
      current.clear();
      seen_moves = false;
    }
    if (!blank && !is_tag) seen_moves = true;
    current.append(line);
    current += '\n';
  }
  bool has_content = false;
  for (char c : current) has_content |= !std::isspace(static_cast<unsigned char>(c));
  if (has_content) games.push_back(std::move(current));
  return games;
}

}  // namespace rankforge
