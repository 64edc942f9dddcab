#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "gocf/engine/protocol.hpp"

namespace gocf {

inline constexpr const char* kMockEngineId = "gocf-mock-1";

// Deterministic stand-in engine. For a candidate move m played by the side
// to move:
//   s(m) = (own stones within Chebyshev distance 2 of m
//           - opponent stones within distance 2) / 10
//        + (1 - manhattan_distance(m, center) / 18) / 10
// counted on the position after m (the played stone itself excluded), and
//   winrate(m) = 0.5 + 0.4 * tanh(s(m)) / 2.
// Pass scores s = -1. Candidates are ranked by winrate, ties by (row, col),
// pass last.
struct MockEngine {
  static constexpr int kReportedCandidates = 10;
  static constexpr double kPassScore = -1.0;

  static double score_after(const Board& after, Point m, Color mover) {
    if (m.is_pass()) return kPassScore;
    const Stone own = stone_of(mover), theirs = stone_of(opponent(mover));
    int balance = 0;
    for (int dr = -2; dr <= 2; ++dr)
      for (int dc = -2; dc <= 2; ++dc) {
        if (dr == 0 && dc == 0) continue;
        int c = m.col() + dc, r = m.row() + dr;
        if (!Point::on_board(c, r)) continue;
        Stone s = after.at(c, r);
        balance += (s == own) - (s == theirs);
      }
    const int center = kBoardSize / 2;
    const int d_center = std::abs(m.col() - center) + std::abs(m.row() - center);
    return balance / 10.0 + (1.0 - d_center / 18.0) / 10.0;
  }

  static double winrate_from_score(double s) { return 0.5 + 0.4 * std::tanh(s) / 2.0; }

  // Winrate of m in position b for the side to move; nullopt if illegal.
  static std::optional<double> winrate(const Board& b, Point m) {
    Board after = b;
    if (after.try_play(b.to_move(), m) != MoveError::None) return std::nullopt;
    return winrate_from_score(score_after(after, m, b.to_move()));
  }

  static Evaluation evaluate(const PositionQuery& q) {
    const Board b = replay(q);
    std::vector<MoveInfo> infos;
    if (!q.allow_moves.empty()) {
      for (Point p : q.allow_moves) {
        auto w = winrate(b, p);
        if (!w) throw PreconditionError("allowMoves contains illegal move " + p.to_sgf());
        infos.push_back({p, *w, 0});
      }
    } else {
      for (Point p : b.legal_moves()) infos.push_back({p, *winrate(b, p), 0});
    }
    std::stable_sort(infos.begin(), infos.end(), [](const MoveInfo& a, const MoveInfo& c) {
      if (a.winrate != c.winrate) return a.winrate > c.winrate;
      return a.move.index() < c.move.index();
    });
    if (q.allow_moves.empty() && infos.size() > kReportedCandidates) infos.resize(kReportedCandidates);
    Evaluation e;
    e.engine_id = kMockEngineId;
    for (std::size_t i = 0; i < infos.size(); ++i) {
      infos[i].visits = std::max(1, q.visits >> std::min<std::size_t>(i + 1, 30));
      e.visits_used += infos[i].visits;
    }
    e.move_infos = std::move(infos);
    e.best_move = e.move_infos.front().move;
    return e;
  }

  // One protocol exchange: a request line in, a response line out.
  static std::string handle_line(const std::string& line) {
    json req;
    try {
      req = json::parse(line);
    } catch (const std::exception& ex) {
      return json{{"error", std::string("could not parse request: ") + ex.what()}}.dump();
    }
    const std::string id = req.value("id", std::string());
    try {
      PositionQuery q = wire::decode_request(req);
      Evaluation e = evaluate(q);
      return wire::encode_response(id, e, static_cast<int>(q.moves.size())).dump();
    } catch (const std::exception& ex) {
      return json{{"id", id}, {"error", ex.what()}}.dump();
    }
  }
};

}  // namespace gocf
