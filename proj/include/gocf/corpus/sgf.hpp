#pragma once

#include <cctype>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gocf/corpus/game_record.hpp"

namespace gocf {

class SgfParseError : public std::runtime_error {
 public:
  SgfParseError(std::size_t offset, const std::string& what)
      : std::runtime_error("sgf parse error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

namespace sgf_detail {

struct Property {
  std::string ident;
  std::vector<std::string> values;
};

using Node = std::vector<Property>;

// Recursive-descent reader over a collection. Only the main line (first
// child at every branch) is returned; other variations are syntax-checked
// and dropped.
class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  std::vector<std::vector<Node>> collection() {
    std::vector<std::vector<Node>> trees;
    skip_ws();
    while (pos_ < s_.size()) {
      if (s_[pos_] != '(') {
        // Tolerate trailing garbage after at least one tree (common in archives).
        if (!trees.empty()) break;
        fail("expected '('");
      }
      std::vector<Node> line;
      game_tree(line, true);
      trees.push_back(std::move(line));
      skip_ws();
    }
    if (trees.empty()) fail("no game tree");
    return trees;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SgfParseError(pos_, msg); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void game_tree(std::vector<Node>& line, bool keep) {
    ++pos_;  // '('
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != ';') fail("expected ';' at start of sequence");
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated game tree");
      if (s_[pos_] != ';') break;
      ++pos_;
      Node n = node();
      if (keep) line.push_back(std::move(n));
    }
    bool first_child = true;
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated game tree");
      char c = s_[pos_];
      if (c == ')') {
        ++pos_;
        return;
      }
      if (c != '(') fail(std::string("unexpected character '") + c + "'");
      game_tree(line, keep && first_child);
      first_child = false;
    }
  }

  Node node() {
    Node n;
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated node");
      char c = s_[pos_];
      if (!std::isalpha(static_cast<unsigned char>(c))) break;
      Property p;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
        // FF[1]-style lowercase letters inside identifiers are ignored.
        if (std::isupper(static_cast<unsigned char>(s_[pos_]))) p.ident.push_back(s_[pos_]);
        ++pos_;
      }
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != '[') fail("property '" + p.ident + "' without value");
      while (pos_ < s_.size() && s_[pos_] == '[') {
        p.values.push_back(value());
        skip_ws();
      }
      n.push_back(std::move(p));
    }
    return n;
  }

  std::string value() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) {
        pos_ = start;
        fail("unterminated property value");
      }
      char c = s_[pos_++];
      if (c == ']') return out;
      if (c == '\\') {
        if (pos_ >= s_.size()) {
          pos_ = start;
          fail("dangling escape");
        }
        char e = s_[pos_++];
        // Escaped line breaks are soft breaks and vanish.
        if (e == '\n' || e == '\r') {
          if (pos_ < s_.size() && (s_[pos_] == '\n' || s_[pos_] == '\r') && s_[pos_] != e) ++pos_;
          continue;
        }
        out.push_back(e);
        continue;
      }
      out.push_back(c);
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

inline GameResult parse_result(std::string_view re) {
  std::string r = trim(re);
  if (r.empty()) return GameResult::Unknown;
  if (r[0] == 'B' || r[0] == 'b') return r.size() > 1 && r[1] == '+' ? GameResult::BlackWin : GameResult::Unknown;
  if (r[0] == 'W' || r[0] == 'w') return r.size() > 1 && r[1] == '+' ? GameResult::WhiteWin : GameResult::Unknown;
  if (r == "0" || r == "Draw" || r == "draw" || r == "Jigo" || r == "jigo") return GameResult::Draw;
  return GameResult::Unknown;
}

// Expands a point or FF[4] compressed rectangle "aa:cc".
inline bool expand_points(std::string_view v, std::vector<Point>& out) {
  auto colon = v.find(':');
  if (colon == std::string_view::npos) {
    auto p = Point::from_sgf(v);
    if (!p || p->is_pass()) return false;
    out.push_back(*p);
    return true;
  }
  auto a = Point::from_sgf(v.substr(0, colon));
  auto b = Point::from_sgf(v.substr(colon + 1));
  if (!a || !b || a->is_pass() || b->is_pass()) return false;
  for (int r = std::min(a->row(), b->row()); r <= std::max(a->row(), b->row()); ++r)
    for (int c = std::min(a->col(), b->col()); c <= std::max(a->col(), b->col()); ++c) out.emplace_back(c, r);
  return true;
}

inline int parse_board_size(std::string_view v) {
  std::string t = trim(v);
  auto colon = t.find(':');
  int w = std::atoi(t.substr(0, colon).c_str());
  if (colon != std::string::npos) {
    int h = std::atoi(t.substr(colon + 1).c_str());
    if (h != w) return -1;
  }
  return w;
}

inline GameRecord to_record(const std::vector<Node>& line) {
  GameRecord g;
  bool in_root = true;
  for (const Node& node : line) {
    for (const Property& p : node) {
      const std::string& id = p.ident;
      const std::string first = p.values.empty() ? std::string() : p.values.front();
      if (id == "B" || id == "W") {
        Color c = id == "B" ? Color::Black : Color::White;
        auto pt = Point::from_sgf(trim(first));
        if (!pt) {
          g.issues.push_back("bad move coordinate '" + first + "' at move " + std::to_string(g.moves.size() + 1));
          continue;
        }
        g.moves.push_back(Move{static_cast<int>(g.moves.size()) + 1, c, *pt});
      } else if (id == "AB" || id == "AW") {
        if (!in_root || !g.moves.empty()) {
          g.issues.push_back("setup property " + id + " after play started");
          continue;
        }
        Color c = id == "AB" ? Color::Black : Color::White;
        std::vector<Point> pts;
        for (const auto& v : p.values)
          if (!expand_points(trim(v), pts)) g.issues.push_back("bad setup coordinate '" + v + "'");
        for (Point pt : pts) g.setup_stones.push_back(SetupStone{c, pt});
      } else if (id == "SZ") {
        g.board_size = parse_board_size(first);
      } else if (id == "DT") {
        if (auto d = Date::parse_lenient(first)) g.date = *d;
        else g.issues.push_back("unparseable DT '" + first + "'");
      } else if (id == "PB") {
        g.black_id = trim(first);
      } else if (id == "PW") {
        g.white_id = trim(first);
      } else if (id == "RE") {
        g.result = parse_result(first);
      } else if (id == "KM") {
        char* end = nullptr;
        std::string t = trim(first);
        double k = std::strtod(t.c_str(), &end);
        if (!t.empty() && end != t.c_str()) g.komi = Komi::from_points(k);
      } else if (id == "GC" && first == "synthetic") {
        g.is_synthetic = true;
      }
    }
    in_root = false;
  }
  return g;
}

inline std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == ']' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

inline const char* result_sgf(GameResult r) {
  switch (r) {
    case GameResult::BlackWin: return "B+";
    case GameResult::WhiteWin: return "W+";
    case GameResult::Draw: return "0";
    case GameResult::Unknown: break;
  }
  return "?";
}

}  // namespace sgf_detail

// One GameRecord per game tree in the collection; game_id and source_path
// are left for the caller.
inline std::vector<GameRecord> parse_sgf(std::string_view bytes) {
  sgf_detail::Reader reader(bytes);
  std::vector<GameRecord> out;
  for (const auto& line : reader.collection()) out.push_back(sgf_detail::to_record(line));
  return out;
}

// Main-line serialization; parse_sgf(write_sgf(g)) reproduces every
// serialized field of g.
inline std::string write_sgf(const GameRecord& g) {
  using namespace sgf_detail;
  std::string s = "(;FF[4]GM[1]SZ[" + std::to_string(g.board_size) + "]";
  if (g.has_date()) s += "DT[" + g.date.to_string() + "]";
  if (!g.black_id.empty()) s += "PB[" + escape_text(g.black_id) + "]";
  if (!g.white_id.empty()) s += "PW[" + escape_text(g.white_id) + "]";
  s += "RE[";
  s += result_sgf(g.result);
  s += "]KM[" + g.komi.to_string() + "]";
  if (g.is_synthetic) s += "GC[synthetic]";
  for (Color c : {Color::Black, Color::White}) {
    bool any = false;
    for (const auto& st : g.setup_stones) {
      if (st.color != c) continue;
      if (!any) s += c == Color::Black ? "AB" : "AW";
      any = true;
      s += "[" + st.point.to_sgf() + "]";
    }
  }
  for (const Move& m : g.moves) {
    s += ";";
    s += color_letter(m.color);
    s += "[" + m.point.to_sgf() + "]";
  }
  s += ")\n";
  return s;
}

}  // namespace gocf
