#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gocf/core/types.hpp"
#include "gocf/rules/zobrist.hpp"

namespace gocf {

enum class Stone : std::uint8_t { Empty = 0, Black = 1, White = 2 };

constexpr Stone stone_of(Color c) noexcept { return c == Color::Black ? Stone::Black : Stone::White; }

enum class MoveError : std::uint8_t { None, WrongColor, Occupied, Suicide, Ko };

inline const char* to_string(MoveError e) noexcept {
  switch (e) {
    case MoveError::None: return "none";
    case MoveError::WrongColor: return "wrong-color";
    case MoveError::Occupied: return "occupied";
    case MoveError::Suicide: return "suicide";
    case MoveError::Ko: return "ko";
  }
  return "?";
}

class IllegalMoveError : public std::runtime_error {
 public:
  IllegalMoveError(MoveError code, Move move)
      : std::runtime_error(std::string("illegal move ") + std::to_string(move.number) + " (" +
                           color_letter(move.color) + " " + move.point.to_sgf() + "): " + to_string(code)),
        code_(code),
        move_(move) {}
  MoveError code() const noexcept { return code_; }
  const Move& move() const noexcept { return move_; }

 private:
  MoveError code_;
  Move move_;
};

// Position state. Simple ko only, suicide illegal.
class Board {
 public:
  Board() noexcept : zobrist_(kZobrist.black_to_move) {}

  Stone at(Point p) const noexcept { return grid_[p.index()]; }
  Stone at(int col, int row) const noexcept { return grid_[row * kBoardSize + col]; }
  Color to_move() const noexcept { return to_move_; }
  std::optional<Point> ko_point() const noexcept {
    if (ko_ < 0) return std::nullopt;
    return Point::from_index(ko_);
  }
  std::uint64_t zobrist() const noexcept { return zobrist_; }
  int move_count() const noexcept { return move_count_; }

  // Places a stone without rule checks; used for setup properties.
  void place_setup_stone(Color c, Point p) {
    if (p.is_pass()) return;
    Stone& s = grid_[p.index()];
    if (s != Stone::Empty) zobrist_ ^= kZobrist.stone[p.index()][static_cast<int>(s) - 1];
    s = stone_of(c);
    zobrist_ ^= kZobrist.stone[p.index()][static_cast<int>(c)];
  }

  void set_to_move(Color c) noexcept {
    if (c != to_move_) {
      zobrist_ ^= kZobrist.black_to_move;
      to_move_ = c;
    }
  }

  // In-place variant; leaves the board untouched on error.
  MoveError try_play(Color color, Point p) {
    if (color != to_move_) return MoveError::WrongColor;
    if (p.is_pass()) {
      ko_ = -1;
      flip_side();
      ++move_count_;
      return MoveError::None;
    }
    const int idx = p.index();
    if (grid_[idx] != Stone::Empty) return MoveError::Occupied;
    if (idx == ko_) return MoveError::Ko;

    const Stone mine = stone_of(color);
    const Stone theirs = stone_of(opponent(color));
    grid_[idx] = mine;
    zobrist_ ^= kZobrist.stone[idx][static_cast<int>(color)];

    int captured = 0;
    int last_captured = -1;
    for (int n : neighbors(idx)) {
      if (n < 0 || grid_[n] != theirs) continue;
      if (!has_liberty(n)) {
        int removed = remove_group(n);
        captured += removed;
        last_captured = n;
      }
    }
    if (captured == 0 && !has_liberty(idx)) {
      grid_[idx] = Stone::Empty;
      zobrist_ ^= kZobrist.stone[idx][static_cast<int>(color)];
      return MoveError::Suicide;
    }

    ko_ = -1;
    if (captured == 1 && is_lone_stone_in_atari(idx)) ko_ = last_captured;
    flip_side();
    ++move_count_;
    return MoveError::None;
  }

  MoveError try_play(const Move& m) { return try_play(m.color, m.point); }

  bool is_legal(Point p) const {
    Board copy = *this;
    return copy.try_play(to_move_, p) == MoveError::None;
  }

  // Moves accepted by try_play for the side to move, pass last.
  std::vector<Point> legal_moves() const {
    std::vector<Point> out;
    out.reserve(kNumPoints + 1);
    for (int i = 0; i < kNumPoints; ++i) {
      Point p = Point::from_index(i);
      if (grid_[i] == Stone::Empty && i != ko_ && is_legal(p)) out.push_back(p);
    }
    out.push_back(Point::pass());
    return out;
  }

  std::uint64_t recompute_zobrist() const noexcept {
    std::uint64_t h = to_move_ == Color::Black ? kZobrist.black_to_move : 0;
    for (int i = 0; i < kNumPoints; ++i)
      if (grid_[i] != Stone::Empty) h ^= kZobrist.stone[i][static_cast<int>(grid_[i]) - 1];
    return h;
  }

  int count(Stone s) const noexcept {
    int n = 0;
    for (Stone x : grid_) n += (x == s);
    return n;
  }

  const std::array<Stone, kNumPoints>& grid() const noexcept { return grid_; }

  friend bool operator==(const Board& a, const Board& b) noexcept {
    return a.grid_ == b.grid_ && a.to_move_ == b.to_move_ && a.ko_ == b.ko_;
  }

  static std::array<int, 4> neighbors(int idx) noexcept {
    const int c = idx % kBoardSize, r = idx / kBoardSize;
    return {c > 0 ? idx - 1 : -1, c < kBoardSize - 1 ? idx + 1 : -1, r > 0 ? idx - kBoardSize : -1,
            r < kBoardSize - 1 ? idx + kBoardSize : -1};
  }

 private:
  void flip_side() noexcept {
    to_move_ = opponent(to_move_);
    zobrist_ ^= kZobrist.black_to_move;
  }

  bool has_liberty(int start) const {
    const Stone s = grid_[start];
    std::bitset<kNumPoints> seen;
    std::array<std::uint16_t, kNumPoints> stack;
    int top = 0;
    stack[top++] = static_cast<std::uint16_t>(start);
    seen.set(start);
    while (top > 0) {
      int cur = stack[--top];
      for (int n : neighbors(cur)) {
        if (n < 0 || seen.test(n)) continue;
        if (grid_[n] == Stone::Empty) return true;
        if (grid_[n] == s) {
          seen.set(n);
          stack[top++] = static_cast<std::uint16_t>(n);
        }
      }
    }
    return false;
  }

  int remove_group(int start) {
    const Stone s = grid_[start];
    const int key = static_cast<int>(s) - 1;
    std::array<std::uint16_t, kNumPoints> stack;
    int top = 0;
    int removed = 0;
    stack[top++] = static_cast<std::uint16_t>(start);
    grid_[start] = Stone::Empty;
    while (top > 0) {
      int cur = stack[--top];
      zobrist_ ^= kZobrist.stone[cur][key];
      ++removed;
      for (int n : neighbors(cur)) {
        if (n >= 0 && grid_[n] == s) {
          grid_[n] = Stone::Empty;
          stack[top++] = static_cast<std::uint16_t>(n);
        }
      }
    }
    return removed;
  }

  bool is_lone_stone_in_atari(int idx) const noexcept {
    const Stone s = grid_[idx];
    int liberties = 0;
    for (int n : neighbors(idx)) {
      if (n < 0) continue;
      if (grid_[n] == s) return false;
      if (grid_[n] == Stone::Empty) ++liberties;
    }
    return liberties == 1;
  }

  std::array<Stone, kNumPoints> grid_{};
  Color to_move_ = Color::Black;
  int ko_ = -1;
  std::uint64_t zobrist_ = 0;
  int move_count_ = 0;
};

// Value-returning variant: copies, plays, throws IllegalMoveError.
inline Board apply_move(const Board& board, const Move& move) {
  Board next = board;
  if (MoveError e = next.try_play(move); e != MoveError::None) throw IllegalMoveError(e, move);
  return next;
}

inline std::vector<Point> legal_moves(const Board& board) { return board.legal_moves(); }

inline std::uint64_t zobrist_hash(const Board& board) noexcept { return board.zobrist(); }

}  // namespace gocf
