#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "gocf/corpus/game_record.hpp"
#include "gocf/engine/selfplay.hpp"
#include "gocf/rules/board.hpp"

namespace gocf::synth {

struct CorpusGenOptions {
  int n_games = 300;
  int max_len = 60;
  int min_len = 60;
  // Probability that a game copies the opening of an earlier game, and the
  // per-move probability of continuing to copy it.
  double follow_prob = 0.85;
  double continue_prob = 0.8;
  // Probability that a game is an exact replay of an earlier game's moves.
  double replay_prob = 0.0;
  int n_players = 30;
  int first_year = 1950;
  int last_year = 2021;
  bool legal = true;
  // Fraction of games with month-only / year-only dates.
  double month_only = 0.05;
  double year_only = 0.02;
};

namespace detail {

inline int pick_int(std::uint64_t& rng, int n) {
  return static_cast<int>(uniform01(rng) * n);
}

inline Point random_point(std::uint64_t& rng, const std::vector<Move>& prev) {
  // Mostly near a recent stone or on the 3rd/4th lines, like real openings.
  const double u = uniform01(rng);
  if (!prev.empty() && u < 0.55) {
    const Move& anchor = prev[prev.size() - 1 - pick_int(rng, std::min<int>(4, static_cast<int>(prev.size())))];
    if (!anchor.point.is_pass()) {
      int c = anchor.point.col() + pick_int(rng, 7) - 3;
      int r = anchor.point.row() + pick_int(rng, 7) - 3;
      if (Point::on_board(c, r)) return Point(c, r);
    }
  }
  if (u < 0.8) {
    static constexpr int lines[] = {2, 3, 15, 16};
    return Point(lines[pick_int(rng, 4)] + pick_int(rng, 3) - 1, lines[pick_int(rng, 4)] + pick_int(rng, 3) - 1);
  }
  return Point(pick_int(rng, kBoardSize), pick_int(rng, kBoardSize));
}

}  // namespace detail

// Deterministic synthetic professional-style corpus, in corpus order.
inline std::vector<GameRecord> generate_corpus(const CorpusGenOptions& opt, std::uint64_t seed) {
  std::uint64_t rng = seed ^ 0xA0761D6478BD642FULL;
  splitmix64_next(rng);
  const int n = opt.n_games;

  // Dates: evenly spread over the span with jitter, then sorted.
  std::vector<Date> dates;
  dates.reserve(n);
  const int span_days = (opt.last_year - opt.first_year + 1) * 365;
  const auto base = std::chrono::sys_days{std::chrono::year{opt.first_year} / std::chrono::January / 1};
  for (int i = 0; i < n; ++i) {
    std::chrono::year_month_day ymd{base + std::chrono::days{detail::pick_int(rng, span_days)}};
    Date d{static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
           static_cast<int>(static_cast<unsigned>(ymd.day()))};
    const double u = uniform01(rng);
    if (u < opt.year_only) d.month = d.day = 0;
    else if (u < opt.year_only + opt.month_only) d.day = 0;
    dates.push_back(d);
  }
  std::stable_sort(dates.begin(), dates.end(), [](const Date& a, const Date& b) { return a.ordinal() < b.ordinal(); });

  std::vector<GameRecord> games;
  games.reserve(n);
  for (int i = 0; i < n; ++i) {
    GameRecord g;
    char id[32];
    std::snprintf(id, sizeof id, "g%07d", i);
    g.game_id = id;
    g.date = dates[i];
    // Players are active over a window of the timeline so panels overlap.
    const int window = std::max(4, opt.n_players / 3);
    const int centre = static_cast<int>(static_cast<double>(i) / std::max(1, n) * opt.n_players);
    auto pick_player = [&] {
      int p = centre + detail::pick_int(rng, window) - window / 2;
      return std::clamp(p, 0, opt.n_players - 1);
    };
    int b = pick_player(), w = pick_player();
    while (w == b && opt.n_players > 1) w = pick_player();
    g.black_id = "p" + std::to_string(b);
    g.white_id = "p" + std::to_string(w);
    g.result = uniform01(rng) < 0.5 ? GameResult::BlackWin : GameResult::WhiteWin;
    g.komi = Komi::from_points(6.5);
    g.source_path = std::string(id) + ".sgf";

    const int len = opt.min_len + detail::pick_int(rng, opt.max_len - opt.min_len + 1);
    const GameRecord* source = nullptr;
    int copy_len = 0;
    if (i > 0 && uniform01(rng) < opt.replay_prob) {
      source = &games[detail::pick_int(rng, i)];
      copy_len = static_cast<int>(source->moves.size());
    } else if (i > 0 && uniform01(rng) < opt.follow_prob) {
      source = &games[detail::pick_int(rng, i)];
      copy_len = 1;
      while (copy_len < static_cast<int>(source->moves.size()) && uniform01(rng) < opt.continue_prob) ++copy_len;
    }
    Board board;
    for (int k = 1; k <= len; ++k) {
      const Color c = board.to_move();
      Point p;
      if (source && k <= copy_len && k <= static_cast<int>(source->moves.size())) {
        p = source->moves[k - 1].point;
      } else {
        int tries = 0;
        do {
          p = detail::random_point(rng, g.moves);
        } while (opt.legal && ++tries < 200 && !board.is_legal(p));
        if (opt.legal && tries >= 200) p = Point::pass();
      }
      if (opt.legal) {
        if (board.try_play(c, p) != MoveError::None) break;
      } else {
        board.set_to_move(opponent(c));
      }
      g.moves.push_back({k, c, p});
    }
    games.push_back(std::move(g));
  }
  std::stable_sort(games.begin(), games.end(), corpus_less);
  return games;
}

}  // namespace gocf::synth
