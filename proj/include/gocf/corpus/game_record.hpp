#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gocf/core/types.hpp"

namespace gocf {

enum class GameResult : std::uint8_t { Unknown, BlackWin, WhiteWin, Draw };

inline const char* to_string(GameResult r) noexcept {
  switch (r) {
    case GameResult::BlackWin: return "black-win";
    case GameResult::WhiteWin: return "white-win";
    case GameResult::Draw: return "draw";
    case GameResult::Unknown: break;
  }
  return "unknown";
}

inline GameResult parse_game_result(std::string_view s) {
  if (s == "black-win") return GameResult::BlackWin;
  if (s == "white-win") return GameResult::WhiteWin;
  if (s == "draw") return GameResult::Draw;
  return GameResult::Unknown;
}

// Komi in quarter points, so 6.5, 2.75 and 375/100 stay exact.
class Komi {
 public:
  constexpr Komi() = default;
  static Komi from_points(double pts) { return Komi(static_cast<int>(std::lround(pts * 4.0))); }
  static constexpr Komi from_quarters(int q) { return Komi(q); }
  constexpr int quarters() const noexcept { return quarters_; }
  constexpr double points() const noexcept { return quarters_ / 4.0; }

  std::string to_string() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", points());
    return buf;
  }

  friend constexpr auto operator<=>(Komi, Komi) = default;

 private:
  constexpr explicit Komi(int q) : quarters_(q) {}
  int quarters_ = 0;
};

struct SetupStone {
  Color color = Color::Black;
  Point point;
  friend bool operator==(const SetupStone&, const SetupStone&) = default;
};

struct GameRecord {
  std::string game_id;
  Date date;  // year == 0 when the source had no usable DT
  std::string black_id;
  std::string white_id;
  GameResult result = GameResult::Unknown;
  Komi komi;
  int board_size = kBoardSize;
  std::vector<SetupStone> setup_stones;
  std::vector<Move> moves;
  std::string source_path;
  bool is_synthetic = false;

  // Structural problems found while parsing (not serialized).
  std::vector<std::string> issues;

  bool has_date() const noexcept { return date.year != 0; }

  const std::string& player(Color c) const noexcept { return c == Color::Black ? black_id : white_id; }

  bool same_content(const GameRecord& o) const {
    return game_id == o.game_id && date == o.date && black_id == o.black_id && white_id == o.white_id &&
           result == o.result && komi == o.komi && board_size == o.board_size &&
           setup_stones == o.setup_stones && moves == o.moves && source_path == o.source_path &&
           is_synthetic == o.is_synthetic;
  }
};

// Corpus total order: (resolved date, synthetic-before-real, game_id).
inline bool corpus_less(const GameRecord& a, const GameRecord& b) {
  const auto da = a.date.ordinal(), db = b.date.ordinal();
  if (da != db) return da < db;
  if (a.is_synthetic != b.is_synthetic) return a.is_synthetic;
  return a.game_id < b.game_id;
}

}  // namespace gocf
