#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gocf/engine/evaluate.hpp"
#include "gocf/novelty/novelty.hpp"
#include "gocf/stats/table1.hpp"

namespace gocf {

using stats::MoveObservation;

enum class FilterKind {
  All,
  DiffersFromAi,
  MatchesAi,
  StageBucket,
  OpponentDeviationResponse,
  NovelMovesOnly,
  NovelDiffersFromAi,
  NovelMatchesAi,
};

struct FilterSpec {
  FilterKind kind = FilterKind::All;
  int bucket = 1;  // StageBucket: 1..6, moves 10(k-1)+1 .. 10k
  // OpponentDeviationResponse: 0 requires every earlier move to have
  // matched; L > 0 only requires the L moves before the deviation to match.
  int min_matched_prefix = 0;

  static FilterSpec parse(std::string_view kind, int bucket = 1, int min_prefix = 0) {
    static const std::map<std::string, FilterKind, std::less<>> kinds = {
        {"all", FilterKind::All},
        {"differs-from-ai", FilterKind::DiffersFromAi},
        {"matches-ai", FilterKind::MatchesAi},
        {"stage-bucket", FilterKind::StageBucket},
        {"opponent-deviation-response", FilterKind::OpponentDeviationResponse},
        {"novel-moves-only", FilterKind::NovelMovesOnly},
        {"novel-differs-from-ai", FilterKind::NovelDiffersFromAi},
        {"novel-matches-ai", FilterKind::NovelMatchesAi},
    };
    auto it = kinds.find(kind);
    if (it == kinds.end()) throw std::invalid_argument("unknown filter kind '" + std::string(kind) + "'");
    if (it->second == FilterKind::StageBucket && (bucket < 1 || bucket > 6))
      throw std::invalid_argument("stage bucket must be in 1..6");
    return {it->second, bucket, min_prefix};
  }
};

class JoinError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Attaches each evaluated move to its game's novelty record. Every evaluated
// game must have a novelty record.
inline std::vector<MoveObservation> join_observations(std::span<const DecisionEval> evals,
                                                      std::span<const NoveltyRecord> novelty) {
  std::unordered_map<std::string, const NoveltyRecord*> by_game;
  for (const auto& r : novelty) by_game.emplace(r.game_id, &r);
  std::vector<std::string> dangling;
  std::vector<MoveObservation> out;
  out.reserve(evals.size());
  for (const auto& d : evals) {
    auto it = by_game.find(d.game_id);
    if (it == by_game.end()) {
      if (dangling.empty() || dangling.back() != d.game_id) dangling.push_back(d.game_id);
      continue;
    }
    const NoveltyRecord& n = *it->second;
    MoveObservation o;
    o.game_id = d.game_id;
    o.move_number = d.move_number;
    o.player_id = d.player_id;
    o.opponent_id = d.opponent_id;
    o.color = d.color;
    o.date = n.date;
    o.month_id = stats::period_of(n.date, stats::PeriodKind::Month);
    o.dqi = d.dqi;
    o.matched_ai = d.matched_ai;
    o.novelty_dummy = n.novel_move_number && *n.novel_move_number == d.move_number;
    o.novelty_index = n.novelty_index;
    out.push_back(std::move(o));
  }
  if (!dangling.empty()) {
    std::string msg = "evaluations reference " + std::to_string(dangling.size()) + " game(s) without novelty records:";
    for (std::size_t i = 0; i < dangling.size() && i < 10; ++i) msg += " " + dangling[i];
    throw JoinError(msg);
  }
  return out;
}

inline bool in_bucket(int move_number, int k) { return move_number >= 10 * (k - 1) + 1 && move_number <= 10 * k; }

// Rows must be grouped by game (as produced by join_observations).
inline std::vector<MoveObservation> apply_filter(std::span<const MoveObservation> rows, const FilterSpec& spec) {
  std::vector<MoveObservation> out;
  if (spec.kind == FilterKind::OpponentDeviationResponse) {
    std::size_t start = 0;
    while (start < rows.size()) {
      std::size_t end = start;
      std::map<int, bool> matched;
      while (end < rows.size() && rows[end].game_id == rows[start].game_id) {
        matched[rows[end].move_number] = rows[end].matched_ai;
        ++end;
      }
      for (std::size_t i = start; i < end; ++i) {
        const int m = rows[i].move_number;
        auto dev = matched.find(m - 1);
        if (dev == matched.end() || dev->second) continue;
        const int from = spec.min_matched_prefix > 0 ? m - 1 - spec.min_matched_prefix : 1;
        if (from < 1) continue;
        bool ok = true;
        for (int j = from; j <= m - 2 && ok; ++j) {
          auto it = matched.find(j);
          ok = it != matched.end() && it->second;
        }
        if (ok) out.push_back(rows[i]);
      }
      start = end;
    }
    return out;
  }
  for (const auto& r : rows) {
    bool keep = false;
    switch (spec.kind) {
      case FilterKind::All: keep = true; break;
      case FilterKind::DiffersFromAi: keep = !r.matched_ai; break;
      case FilterKind::MatchesAi: keep = r.matched_ai; break;
      case FilterKind::StageBucket: keep = in_bucket(r.move_number, spec.bucket); break;
      case FilterKind::NovelMovesOnly: keep = r.novelty_dummy; break;
      case FilterKind::NovelDiffersFromAi: keep = r.novelty_dummy && !r.matched_ai; break;
      case FilterKind::NovelMatchesAi: keep = r.novelty_dummy && r.matched_ai; break;
      case FilterKind::OpponentDeviationResponse: break;
    }
    if (keep) out.push_back(r);
  }
  return out;
}

}  // namespace gocf
