#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "gocf/rules/board.hpp"
#include "gocf/testing/oracles.hpp"
#include "test_util.hpp"

using namespace gocf;

namespace {

Point P(int c, int r) { return Point(c, r); }

bool every_group_has_liberty(const Board& b) {
  oracle::SlowBoard s;
  for (int i = 0; i < kNumPoints; ++i)
    s.cell[i] = b.grid()[i] == Stone::Black ? 'B' : b.grid()[i] == Stone::White ? 'W' : 0;
  for (int i = 0; i < kNumPoints; ++i)
    if (s.cell[i] && oracle::group_of(s, i).second == 0) return false;
  return true;
}

}  // namespace

TEST(Board, CornerCapture) {
  Board b;
  b.place_setup_stone(Color::White, P(0, 0));
  b.place_setup_stone(Color::Black, P(1, 0));
  ASSERT_EQ(b.try_play(Color::Black, P(0, 1)), MoveError::None);
  EXPECT_EQ(b.at(P(0, 0)), Stone::Empty);
  EXPECT_EQ(b.count(Stone::Black), 2);
  EXPECT_EQ(b.zobrist(), b.recompute_zobrist());
}

TEST(Board, PassFlipsSideAndClearsKo) {
  // Black captures at a ko shape, then passes.
  Board b;
  for (auto [c, p] : std::vector<std::pair<Color, Point>>{{Color::Black, P(1, 0)}, {Color::Black, P(0, 1)},
                                                          {Color::Black, P(2, 1)}, {Color::White, P(2, 0)},
                                                          {Color::White, P(3, 1)}, {Color::White, P(2, 2)}})
    b.place_setup_stone(c, p);
  b.set_to_move(Color::Black);
  b.place_setup_stone(Color::Black, P(1, 2));
  ASSERT_EQ(b.try_play(Color::White, P(1, 1)), MoveError::WrongColor);
  ASSERT_EQ(b.try_play(Color::Black, P(10, 10)), MoveError::None);  // tenuki
  ASSERT_EQ(b.try_play(Color::White, P(1, 1)), MoveError::None);  // captures B(2,1)
  EXPECT_EQ(b.at(P(2, 1)), Stone::Empty);
  ASSERT_TRUE(b.ko_point().has_value());
  EXPECT_EQ(*b.ko_point(), P(2, 1));
  EXPECT_EQ(b.try_play(Color::Black, P(2, 1)), MoveError::Ko);

  const auto grid = b.grid();
  ASSERT_EQ(b.try_play(Color::Black, Point::pass()), MoveError::None);
  EXPECT_EQ(b.grid(), grid);
  EXPECT_EQ(b.to_move(), Color::White);
  EXPECT_FALSE(b.ko_point().has_value());
  EXPECT_EQ(b.zobrist(), b.recompute_zobrist());
}

TEST(Board, SuicideAndOccupiedRejectedWithoutChange) {
  Board b;
  b.place_setup_stone(Color::White, P(1, 0));
  b.place_setup_stone(Color::White, P(0, 1));
  const Board before = b;
  EXPECT_EQ(b.try_play(Color::Black, P(0, 0)), MoveError::Suicide);
  EXPECT_EQ(b, before);
  EXPECT_EQ(b.try_play(Color::Black, P(1, 0)), MoveError::Occupied);
  EXPECT_EQ(b, before);
  EXPECT_THROW(apply_move(b, {1, Color::Black, P(0, 0)}), IllegalMoveError);
}

TEST(Board, LegalMoveCounts) {
  Board b;
  auto legal = legal_moves(b);
  EXPECT_EQ(legal.size(), 362u);
  EXPECT_TRUE(legal.back().is_pass());
  b.try_play(Color::Black, P(3, 3));
  EXPECT_EQ(legal_moves(b).size(), 361u);
}

TEST(Board, LegalMovesMatchExhaustiveApplication) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    auto moves = testutil::random_playout(rng, 40 + trial * 5);
    Board b;
    for (const auto& m : moves) b.try_play(m);
    std::set<int> fast;
    for (Point p : legal_moves(b)) fast.insert(p.index());
    std::set<int> brute;
    for (int i = 0; i <= kNumPoints; ++i) {
      try {
        apply_move(b, {0, b.to_move(), Point::from_index(i)});
        brute.insert(i);
      } catch (const IllegalMoveError&) {
      }
    }
    EXPECT_EQ(fast, brute);
    EXPECT_EQ(fast, oracle::slow_legal_moves(moves, b.to_move())) << "trial " << trial;
  }
}

TEST(Board, RandomPlayoutsMatchFloodFillReplayer) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto moves = testutil::random_playout(rng, 120, 0.02);
    Board b;
    for (const auto& m : moves) {
      ASSERT_EQ(b.try_play(m), MoveError::None);
      ASSERT_TRUE(every_group_has_liberty(b));
    }
    auto slow = oracle::slow_replay({}, moves);
    ASSERT_FALSE(slow.first_bad.has_value());
    for (int i = 0; i < kNumPoints; ++i) {
      const char want = b.grid()[i] == Stone::Black ? 'B' : b.grid()[i] == Stone::White ? 'W' : 0;
      ASSERT_EQ(slow.board.cell[i], want);
    }
  }
}

TEST(Zobrist, IncrementalEqualsRecompute) {
  std::mt19937_64 rng(3);
  int applied = 0;
  while (applied < 20000) {
    Board b;
    for (const auto& m : testutil::random_playout(rng, 200, 0.01)) {
      b.try_play(m);
      ASSERT_EQ(b.zobrist(), b.recompute_zobrist());
      ++applied;
    }
  }
}

TEST(Zobrist, DependsOnlyOnState) {
  Board a, b;
  for (const char* s : {"dd", "pp", "dp", "pd"}) a.try_play(a.to_move(), *Point::from_sgf(s));
  for (const char* s : {"dp", "pd", "dd", "pp"}) b.try_play(b.to_move(), *Point::from_sgf(s));
  EXPECT_EQ(a.grid(), b.grid());
  EXPECT_EQ(a.zobrist(), b.zobrist());
  Board c;
  EXPECT_NE(a.zobrist(), c.zobrist());
  c.try_play(Color::Black, Point::pass());
  EXPECT_NE(c.zobrist(), Board().zobrist());
}

TEST(Zobrist, EmptyBoardGolden) {
  std::ifstream in(std::string(GOCF_SOURCE_DIR) + "/tests/golden/zobrist_empty.txt");
  ASSERT_TRUE(in) << "missing golden file";
  std::string hex;
  in >> hex;
  EXPECT_EQ(std::stoull(hex, nullptr, 16), Board().zobrist());
  EXPECT_EQ(Board().zobrist(), kZobrist.black_to_move);
}
