#pragma once

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "gocf/engine/evaluate.hpp"
#include "gocf/rules/zobrist.hpp"

namespace gocf {

struct SelfplayConfig {
  int max_move = 60;
  int visits = 50;
  Komi komi = Komi::from_points(6.5);
  Ruleset rules = Ruleset::Japanese;
  int top_k = 5;
  double temperature = 0.02;  // in winrate units
};

// Uniform double in [0,1) from a splitmix64 stream; platform independent.
inline double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64_next(state) >> 11) * 0x1.0p-53;
}

// Each game starts from the empty board and samples among the engine's top_k
// candidates with weights exp((winrate - best) / temperature). Game i uses
// its own stream seeded from (seed, i), so output depends only on the engine
// and the seed.
inline std::vector<GameRecord> selfplay_generate(Evaluator& ev, int n_games, std::uint64_t seed,
                                                 const SelfplayConfig& cfg = {}) {
  if (n_games < 1) throw std::invalid_argument("selfplay: n_games must be >= 1");
  std::vector<GameRecord> games;
  for (int gi = 0; gi < n_games; ++gi) {
    std::uint64_t state = seed * 0x100000001B3ULL + static_cast<std::uint64_t>(gi);
    splitmix64_next(state);
    GameRecord g;
    char name[64];
    std::snprintf(name, sizeof name, "selfplay-%llu-%05d", static_cast<unsigned long long>(seed), gi);
    g.game_id = name;
    g.source_path = std::string(name) + ".sgf";
    g.black_id = g.white_id = ev.engine().id();
    g.komi = cfg.komi;
    g.is_synthetic = true;
    try {
      Board b;
      for (int k = 1; k <= cfg.max_move; ++k) {
        PositionQuery q = position_before(g, g.moves.size(), cfg.komi, cfg.rules, cfg.visits);
        Evaluation e = ev.evaluate_position(q);
        const int k_max = std::min<int>(cfg.top_k, static_cast<int>(e.move_infos.size()));
        std::vector<double> w(k_max);
        double total = 0.0;
        for (int i = 0; i < k_max; ++i) {
          w[i] = std::exp((e.move_infos[i].winrate - e.best_winrate()) / cfg.temperature);
          total += w[i];
        }
        double r = uniform01(state) * total;
        int pick = k_max - 1;
        for (int i = 0; i < k_max; ++i) {
          if (r < w[i]) {
            pick = i;
            break;
          }
          r -= w[i];
        }
        Point p = e.move_infos[pick].move;
        if (b.try_play(b.to_move(), p) != MoveError::None)
          throw EngineError("engine proposed illegal move " + p.to_sgf());
        g.moves.push_back({k, opponent(b.to_move()), p});
      }
    } catch (const std::exception& ex) {
      spdlog::warn("selfplay game {} discarded: {}", g.game_id, ex.what());
      continue;
    }
    games.push_back(std::move(g));
  }
  return games;
}

}  // namespace gocf
