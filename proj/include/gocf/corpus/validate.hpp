#pragma once

#include <optional>
#include <string>

#include "gocf/corpus/game_record.hpp"
#include "gocf/rules/board.hpp"

namespace gocf {

enum class ValidationStatus : std::uint8_t { Ok, IllegalMove, Malformed, OutOfScope };

inline const char* to_string(ValidationStatus s) noexcept {
  switch (s) {
    case ValidationStatus::Ok: return "ok";
    case ValidationStatus::IllegalMove: return "illegal-move";
    case ValidationStatus::Malformed: return "malformed";
    case ValidationStatus::OutOfScope: return "out-of-scope";
  }
  return "?";
}

struct ValidationReport {
  std::string game_id;
  ValidationStatus status = ValidationStatus::Ok;
  std::optional<int> first_bad_move;
  std::string detail;
};

// Board with setup stones placed and the side to move chosen: White may
// start only when setup stones exist.
inline Board initial_board(const GameRecord& g) {
  Board b;
  for (const auto& s : g.setup_stones) b.place_setup_stone(s.color, s.point);
  if (!g.setup_stones.empty() && !g.moves.empty()) b.set_to_move(g.moves.front().color);
  return b;
}

inline ValidationReport validate_record(const GameRecord& g, const Date& max_date = Date::today()) {
  ValidationReport r{g.game_id, ValidationStatus::Ok, std::nullopt, {}};
  if (g.board_size != kBoardSize) {
    r.status = ValidationStatus::OutOfScope;
    r.detail = "board size " + std::to_string(g.board_size);
    return r;
  }
  if (!g.issues.empty()) {
    r.status = ValidationStatus::Malformed;
    r.detail = g.issues.front();
    return r;
  }
  if (!g.has_date()) {
    r.status = ValidationStatus::Malformed;
    r.detail = "missing date";
    return r;
  }
  if (g.date.year < 1900 || g.date.ordinal() > max_date.ordinal()) {
    r.status = ValidationStatus::Malformed;
    r.detail = "date out of range: " + g.date.to_string();
    return r;
  }
  Board b = initial_board(g);
  for (std::size_t i = 0; i < g.moves.size(); ++i) {
    const Move& m = g.moves[i];
    if (m.number != static_cast<int>(i) + 1) {
      r.status = ValidationStatus::Malformed;
      r.first_bad_move = static_cast<int>(i) + 1;
      r.detail = "move numbering";
      return r;
    }
    if (MoveError e = b.try_play(m); e != MoveError::None) {
      r.status = ValidationStatus::IllegalMove;
      r.first_bad_move = m.number;
      r.detail = to_string(e);
      return r;
    }
  }
  return r;
}

}  // namespace gocf
