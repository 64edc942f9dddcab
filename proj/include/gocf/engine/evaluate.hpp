#pragma once

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <iterator>
#include <mutex>
#include <thread>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gocf/core/csv.hpp"
#include "gocf/engine/engine_client.hpp"
#include "gocf/engine/eval_cache.hpp"

namespace gocf {

// Decision Quality Index in percentage points:
// 100 - 100 * (best_winrate - human_winrate).
inline double dqi(double human_winrate, double best_winrate) {
  if (!(human_winrate >= 0.0 && human_winrate <= 1.0) || !(best_winrate >= 0.0 && best_winrate <= 1.0))
    throw std::domain_error("dqi: winrates must lie in [0,1]");
  return 100.0 - 100.0 * (best_winrate - human_winrate);
}

struct DecisionEval {
  std::string game_id;
  int move_number = 0;
  std::string player_id;
  std::string opponent_id;
  Color color = Color::Black;
  Point human_move;
  double human_winrate = 0.0;
  Point best_move;
  double best_winrate = 0.0;
  double dqi = 100.0;
  bool matched_ai = false;
};

struct EvalConfig {
  int visits = 50;
  Komi komi = Komi::from_points(6.5);
  Ruleset rules = Ruleset::Japanese;
  int max_move = 60;
};

// Cached, replay-checked access to an engine.
class Evaluator {
 public:
  Evaluator(EngineClient& engine, EvalCache& cache) : engine_(engine), cache_(cache) {}

  EngineClient& engine() noexcept { return engine_; }

  Evaluation evaluate_position(const PositionQuery& q) {
    auto all = evaluate_positions(std::span<const PositionQuery>(&q, 1));
    return std::move(all.front());
  }

  // Validates every query first; on any illegal replay no request is sent.
  std::vector<Evaluation> evaluate_positions(std::span<const PositionQuery> queries) {
    std::vector<CacheKey> keys;
    keys.reserve(queries.size());
    for (const auto& q : queries) {
      if (q.allow_moves.size() > 1) throw PreconditionError("at most one forced move per cached query");
      Board b = replay(q);
      CacheKey k;
      k.zobrist = b.zobrist();
      k.to_move = q.to_move;
      k.rules = q.rules;
      k.forced = q.allow_moves.empty() ? CacheKey::kNoForced : static_cast<std::uint16_t>(q.allow_moves[0].index());
      k.komi_quarters = q.komi.quarters();
      k.visits = static_cast<std::uint32_t>(q.visits);
      k.engine_id = engine_.id();
      keys.push_back(std::move(k));
    }
    std::vector<Evaluation> out(queries.size());
    std::vector<PositionQuery> misses;
    std::vector<std::size_t> miss_at;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      if (auto hit = cache_.lookup(keys[i])) {
        out[i] = std::move(*hit);
        continue;
      }
      // Transpositions inside one batch share a single request.
      bool dup = false;
      for (std::size_t j : miss_at)
        if (keys[j] == keys[i]) dup = true;
      if (!dup) {
        misses.push_back(queries[i]);
        miss_at.push_back(i);
      }
    }
    if (!misses.empty()) {
      auto fresh = engine_.analyze(misses);
      for (std::size_t m = 0; m < misses.size(); ++m) cache_.store(keys[miss_at[m]], fresh[m]);
    }
    for (std::size_t i = 0; i < queries.size(); ++i)
      if (out[i].move_infos.empty()) out[i] = *cache_.lookup(keys[i]);
    return out;
  }

 private:
  EngineClient& engine_;
  EvalCache& cache_;
};

class GameEvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// For each move 1..max_move: analyse the position before it, force an
// evaluation of the human move when the engine did not report it, and take
// best_winrate as the max over everything evaluated, human move included.
inline std::vector<DecisionEval> evaluate_game(Evaluator& ev, const GameRecord& g, const EvalConfig& cfg) {
  const std::size_t n = std::min<std::size_t>(g.moves.size(), cfg.max_move);
  std::vector<PositionQuery> base;
  base.reserve(n);
  for (std::size_t i = 0; i < n; ++i) base.push_back(position_before(g, i, cfg.komi, cfg.rules, cfg.visits));

  std::vector<Evaluation> evals;
  try {
    evals = ev.evaluate_positions(base);
  } catch (const std::exception& e) {
    throw GameEvalError("game " + g.game_id + ": " + e.what());
  }

  std::vector<PositionQuery> forced;
  std::vector<std::size_t> forced_at;
  for (std::size_t i = 0; i < n; ++i) {
    if (evals[i].winrate_of(g.moves[i].point)) continue;
    PositionQuery q = base[i];
    q.allow_moves = {g.moves[i].point};
    forced.push_back(std::move(q));
    forced_at.push_back(i);
  }
  std::vector<Evaluation> forced_evals;
  try {
    forced_evals = ev.evaluate_positions(forced);
  } catch (const std::exception& e) {
    throw GameEvalError("game " + g.game_id + " (forced human moves): " + e.what());
  }

  std::vector<DecisionEval> out;
  out.reserve(n);
  std::size_t f = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Move& m = g.moves[i];
    double human;
    if (f < forced_at.size() && forced_at[f] == i) {
      auto w = forced_evals[f].winrate_of(m.point);
      if (!w) throw GameEvalError("game " + g.game_id + ": engine ignored forced move " + std::to_string(m.number));
      human = *w;
      ++f;
    } else {
      human = *evals[i].winrate_of(m.point);
    }
    const double engine_best = evals[i].best_winrate();
    DecisionEval d;
    d.game_id = g.game_id;
    d.move_number = m.number;
    d.color = m.color;
    d.player_id = g.player(m.color);
    d.opponent_id = g.player(opponent(m.color));
    d.human_move = m.point;
    d.human_winrate = human;
    if (human > engine_best) {
      d.best_move = m.point;
      d.best_winrate = human;
    } else {
      d.best_move = evals[i].best_move;
      d.best_winrate = engine_best;
    }
    d.matched_ai = d.best_move == m.point;
    d.dqi = d.matched_ai ? 100.0 : dqi(d.human_winrate, d.best_winrate);
    out.push_back(std::move(d));
  }
  return out;
}

// Evaluates games on `workers` engine instances sharing one cache. Output is
// in game order regardless of scheduling. The first failure stops the run
// and is rethrown; evaluations already cached stay cached.
inline std::vector<DecisionEval> evaluate_games(std::span<const GameRecord> games, const EngineOptions& engine_opt,
                                                EvalCache& cache, const EvalConfig& cfg, unsigned workers = 1) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, games.size()))));
  std::vector<std::vector<DecisionEval>> per_game(games.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        try {
          EngineClient client = EngineClient::open(engine_opt);
          Evaluator ev(client, cache);
          for (std::size_t i = next++; i < games.size() && !failed; i = next++)
            per_game[i] = evaluate_game(ev, games[i], cfg);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          failed = true;
        }
      });
  }
  if (first_error) std::rethrow_exception(first_error);
  std::vector<DecisionEval> out;
  for (auto& g : per_game) std::move(g.begin(), g.end(), std::back_inserter(out));
  return out;
}

inline const std::vector<std::string>& decision_eval_header() {
  static const std::vector<std::string> h = {"game_id",      "move_number",   "player_id", "opponent_id",
                                             "color",        "human_move",    "human_winrate",
                                             "best_move",    "best_winrate",  "dqi",
                                             "matched_ai"};
  return h;
}

inline void append_decision_evals(csv::Writer& w, std::span<const DecisionEval> rows) {
  for (const auto& d : rows)
    w.row({d.game_id, std::to_string(d.move_number), d.player_id, d.opponent_id, std::string(1, color_letter(d.color)),
           d.human_move.to_sgf(), csv::fmt(d.human_winrate, 9), d.best_move.to_sgf(), csv::fmt(d.best_winrate, 9),
           csv::fmt(d.dqi, 7), d.matched_ai ? "1" : "0"});
}

inline std::vector<DecisionEval> read_decision_evals(const csv::Table& t) {
  const auto c_g = t.col("game_id"), c_m = t.col("move_number"), c_p = t.col("player_id"), c_o = t.col("opponent_id"),
             c_c = t.col("color"), c_h = t.col("human_move"), c_hw = t.col("human_winrate"), c_b = t.col("best_move"),
             c_bw = t.col("best_winrate"), c_d = t.col("dqi"), c_x = t.col("matched_ai");
  std::vector<DecisionEval> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    DecisionEval d;
    d.game_id = r[c_g];
    d.move_number = static_cast<int>(csv::to_int(r[c_m]));
    d.player_id = r[c_p];
    d.opponent_id = r[c_o];
    d.color = parse_color(r[c_c]);
    d.human_move = wire::parse_move(r[c_h]);
    d.human_winrate = csv::to_double(r[c_hw]);
    d.best_move = wire::parse_move(r[c_b]);
    d.best_winrate = csv::to_double(r[c_bw]);
    d.dqi = csv::to_double(r[c_d]);
    d.matched_ai = r[c_x] == "1";
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace gocf
