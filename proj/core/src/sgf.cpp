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

#include "rankforge/sgf.hpp"

#include <cctype>
#include <map>
#include <vector>

#include "rankforge/error.hpp"
#include "rankforge/goboard.hpp"

namespace rankforge {

namespace {

struct SgfNode {
  std::map<std::string, std::vector<std::string>> props;
  std::size_t offset = 0;
};

class SgfReader {
 public:
  explicit SgfReader(std::string_view text) : text_(text) {}

  // Main line of the first game tree.
  std::vector<SgfNode> read_main_line() {
    skip_ws();
    if (!consume('(')) throw ParseError("expected '(' at start of game tree", pos_);
    std::vector<SgfNode> nodes;
    read_tree_body(nodes, /*on_main_line=*/true);
    return nodes;
  }

 private:
  // Reads a tree after its '(' up to and including the matching ')'.
  void read_tree_body(std::vector<SgfNode>& nodes, bool on_main_line) {
    const std::size_t open = pos_ - 1;
    skip_ws();
    if (peek() != ';') throw ParseError("game tree without nodes", pos_);
    while (true) {
      skip_ws();
      if (at_end()) throw ParseError("unbalanced parentheses: tree opened here is never closed", open);
      const char c = peek();
      if (c == ';') {
        ++pos_;
        SgfNode node = read_node();
        if (on_main_line) nodes.push_back(std::move(node));
      } else if (c == '(') {
        // The first variation continues the main line; later ones are skipped.
        bool first = true;
        while (true) {
          skip_ws();
          if (peek() != '(') break;
          ++pos_;
          read_tree_body(nodes, on_main_line && first);
          first = false;
        }
        skip_ws();
        if (!consume(')'))
          throw ParseError(at_end() ? "unbalanced parentheses: tree opened here is never closed"
                                    : "unexpected content after variations",
                           at_end() ? open : pos_);
        return;
      } else if (c == ')') {
        ++pos_;
        return;
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
      }
    }
  }

  SgfNode read_node() {
    SgfNode node;
    node.offset = pos_ - 1;
    while (true) {
      skip_ws();
      if (at_end()) return node;
      const char c = peek();
      if (!std::isalpha(static_cast<unsigned char>(c))) return node;
      std::string ident;
      while (!at_end() && std::isalpha(static_cast<unsigned char>(peek()))) {
        // Old-style long identifiers keep only their upper-case letters.
        if (std::isupper(static_cast<unsigned char>(peek()))) ident += peek();
        ++pos_;
      }
      skip_ws();
      if (peek() != '[') throw ParseError("property " + ident + " has no value", pos_);
      auto& values = node.props[ident];
      while (true) {
        skip_ws();
        if (peek() != '[') break;
        values.push_back(read_value());
      }
    }
  }

  std::string read_value() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    std::string out;
    while (true) {
      if (at_end()) throw ParseError("unterminated property value", start);
      const char c = text_[pos_++];
      if (c == ']') return out;
      if (c == '\\') {
        if (at_end()) throw ParseError("unterminated property value", start);
        const char e = text_[pos_++];
        if (e == '\n') continue;  // soft line break
        if (e == '\r') {
          if (!at_end() && peek() == '\n') ++pos_;
          continue;
        }
        out += e;
      } else {
        out += c;
      }
    }
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

Termination go_termination(std::string_view re) {
  std::string r;
  for (char c : re) r += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (r.empty() || r == "?" || r == "VOID") return Termination::kOther;
  if (r == "0" || r == "DRAW" || r == "JIGO") return Termination::kDraw;
  if (r.size() < 2 || (r[0] != 'B' && r[0] != 'W') || r[1] != '+') return Termination::kOther;
  const std::string tail = r.substr(2);
  if (tail == "R" || tail == "RESIGN") return Termination::kResign;
  if (tail == "T" || tail == "TIME") return Termination::kTimeout;
  if (tail == "F" || tail == "FORFEIT") return Termination::kDisconnect;
  if (tail.empty()) return Termination::kOther;
  bool numeric = true;
  for (char c : tail) numeric &= std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  return numeric ? Termination::kPassPass : Termination::kOther;
}

std::string escape(std::string_view v) {
  std::string out;
  for (char c : v) {
    if (c == ']' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

MatchRecord parse_sgf(std::string_view text) {
  SgfReader reader(text);
  const std::vector<SgfNode> nodes = reader.read_main_line();
  if (nodes.empty()) throw ParseError("empty game tree", 0);

  MatchRecord rec;
  rec.game = Game::kGo;
  const SgfNode& root = nodes.front();
  auto first = [&](const char* key) -> std::string {
    auto it = root.props.find(key);
    return it == root.props.end() || it->second.empty() ? std::string{} : it->second.front();
  };
  if (auto gm = first("GM"); !gm.empty() && gm != "1")
    throw ParseError("GM[" + gm + "] is not a Go record", root.offset);
  if (auto sz = first("SZ"); !sz.empty() && sz != "19")
    throw ParseError("unsupported board size SZ[" + sz + "]", root.offset);

  rec.black_player = first("PB");
  rec.white_player = first("PW");
  rec.black_label = first("BR");
  rec.white_label = first("WR");
  rec.result = first("RE");
  rec.date = first("DT");
  rec.termination = go_termination(rec.result);

  go::Board board;
  for (const char* key : {"AB", "AW"}) {
    auto it = root.props.find(key);
    if (it == root.props.end()) continue;
    for (const std::string& v : it->second) {
      auto p = go::sgf_to_point(v);
      if (!p) throw ParseError(std::string("bad setup coordinate ") + key + "[" + v + "]", root.offset);
      const bool black = key[1] == 'B';
      board.place_setup(*p, black ? go::Stone::kBlack : go::Stone::kWhite);
      (black ? rec.setup_black : rec.setup_white).push_back(go::point_to_gtp(*p));
    }
  }
  for (const auto& [key, values] : root.props) {
    if (key == "GM" || key == "SZ" || key == "PB" || key == "PW" || key == "BR" || key == "WR" ||
        key == "RE" || key == "DT" || key == "AB" || key == "AW" || key == "B" || key == "W")
      continue;
    if (!values.empty()) rec.metadata[key] = values.front();
  }

  // Moves may start in the root node (some servers do this) or in later nodes.
  int ply = 0;
  std::optional<Side> last_mover;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const SgfNode& node = nodes[i];
    const bool has_b = node.props.count("B") > 0;
    const bool has_w = node.props.count("W") > 0;
    if (i == 0 && !has_b && !has_w) continue;
    if (has_b == has_w) throw ParseError("node without exactly one move property", node.offset);
    const Side mover = has_b ? Side::kBlack : Side::kWhite;
    if (last_mover ? *last_mover == mover
                   : (mover == Side::kWhite && rec.setup_black.empty() && rec.setup_white.empty()))
      throw ParseError("moves do not alternate", node.offset);
    last_mover = mover;
    const auto& vals = node.props.at(has_b ? "B" : "W");
    const std::string coord = vals.empty() ? std::string{} : vals.front();
    std::optional<go::Point> point;
    if (!coord.empty() && coord != "tt") {
      point = go::sgf_to_point(coord);
      if (!point) throw ParseError("bad move coordinate [" + coord + "]", node.offset);
    }
    board.set_to_move(mover == Side::kBlack ? go::Stone::kBlack : go::Stone::kWhite);
    Ply p;
    p.index = ++ply;
    p.mover = mover;
    p.move = go::encode_move(point);
    p.state_before = board.encode();
    if (!board.play(point))
      throw ParseError("illegal move " + p.move + " at ply " + std::to_string(ply), node.offset);
    rec.plies.push_back(std::move(p));
  }
  return rec;
}

std::string serialize_sgf(const MatchRecord& record) {
  std::string out = "(;GM[1]SZ[19]";
  auto prop = [&](const char* key, const std::string& v) {
    if (v.empty()) return;
    out += key;
    out += '[' + escape(v) + ']';
  };
  prop("PB", record.black_player);
  prop("PW", record.white_player);
  prop("BR", record.black_label);
  prop("WR", record.white_label);
  prop("RE", record.result);
  prop("DT", record.date);
  for (const auto& [key, value] : record.metadata) {
    out += key;
    out += '[' + escape(value) + ']';
  }
  auto setup = [&](const char* key, const std::vector<std::string>& stones) {
    if (stones.empty()) return;
    out += key;
    for (const auto& s : stones) out += '[' + go::point_to_sgf(*go::gtp_to_point(s)) + ']';
  };
  setup("AB", record.setup_black);
  setup("AW", record.setup_white);
  out += '\n';
  for (const Ply& p : record.plies) {
    out += p.mover == Side::kBlack ? ";B[" : ";W[";
    if (p.move != "pass") out += go::point_to_sgf(*go::gtp_to_point(p.move));
    out += ']';
    if (p.index % 10 == 0) out += '\n';
  }
  out += ")\n";
  return out;
}

}  // namespace rankforge
