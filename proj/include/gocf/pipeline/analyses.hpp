#pragma once

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gocf/pipeline/filter.hpp"
#include "gocf/stats/table1.hpp"

namespace gocf {

enum class Metric { Dqi, Novelty };

inline Metric parse_metric(std::string_view s) {
  if (s == "dqi") return Metric::Dqi;
  if (s == "novelty") return Metric::Novelty;
  throw std::invalid_argument("metric must be 'dqi' or 'novelty', got '" + std::string(s) + "'");
}

inline const char* to_string(Metric m) { return m == Metric::Dqi ? "dqi" : "novelty"; }

inline int observation_period(const MoveObservation& o, stats::PeriodKind kind) {
  if (o.date) return stats::period_of(*o.date, kind);
  if (o.month_id) return kind == stats::PeriodKind::Month ? *o.month_id : *o.month_id / 12;
  throw std::invalid_argument("observation " + o.game_id + "/" + std::to_string(o.move_number) +
                              " has neither date nor month_id");
}

// Player-period inputs for a trend. DQI uses every row. Novelty uses each
// game's novel move, credited to the player who made it, or to both players
// when `both_players` is set.
inline std::vector<stats::PanelInput> panel_inputs(std::span<const MoveObservation> obs, Metric metric,
                                                   stats::PeriodKind kind, bool both_players = false) {
  std::vector<stats::PanelInput> rows;
  for (const auto& o : obs) {
    if (metric == Metric::Dqi) {
      rows.push_back({o.player_id, observation_period(o, kind), o.dqi});
    } else if (o.novelty_dummy && o.novelty_index) {
      const int per = observation_period(o, kind);
      rows.push_back({o.player_id, per, static_cast<double>(*o.novelty_index)});
      if (both_players && !o.opponent_id.empty()) rows.push_back({o.opponent_id, per, static_cast<double>(*o.novelty_index)});
    }
  }
  return rows;
}

// Baseline defaults to the earliest period in the panel.
inline stats::TrendSeries trend_for(std::span<const MoveObservation> obs, Metric metric, stats::PeriodKind kind,
                                    std::optional<int> baseline, bool both_players = false,
                                    const stats::FeOptions& opt = {}) {
  const auto inputs = panel_inputs(obs, metric, kind, both_players);
  const auto panel = stats::aggregate_player_period(inputs);
  if (panel.empty()) throw stats::EstimationError("trend: no observations");
  int base = panel.front().period;
  for (const auto& p : panel) base = std::min(base, p.period);
  return stats::trend_series(panel, kind, baseline.value_or(base), opt);
}

struct TrendSpec {
  std::string name;  // output stem: trend_<name>.csv
  Metric metric = Metric::Dqi;
  stats::PeriodKind kind = stats::PeriodKind::Year;
  FilterSpec filter;
  bool injected = false;  // uses observations re-scored after injection
};

// The trend series produced by `run`.
inline std::vector<TrendSpec> standard_trends(int relaxed_prefix, bool with_injected) {
  using stats::PeriodKind;
  std::vector<TrendSpec> t;
  for (PeriodKind k : {PeriodKind::Year, PeriodKind::Month}) {
    const std::string per = k == PeriodKind::Year ? "year" : "month";
    t.push_back({"dqi_" + per, Metric::Dqi, k, {}, false});
    t.push_back({"novelty_" + per, Metric::Novelty, k, {}, false});
    t.push_back({"dqi_" + per + "_differs", Metric::Dqi, k, FilterSpec::parse("differs-from-ai"), false});
  }
  for (int b = 1; b <= 6; ++b) {
    char name[48];
    std::snprintf(name, sizeof name, "dqi_year_moves_%02d_%02d", 10 * (b - 1) + 1, 10 * b);
    t.push_back({name, Metric::Dqi, PeriodKind::Year, FilterSpec::parse("stage-bucket", b), false});
  }
  t.push_back({"dqi_year_deviation_response", Metric::Dqi, PeriodKind::Year,
               FilterSpec::parse("opponent-deviation-response"), false});
  if (relaxed_prefix > 0)
    t.push_back({"dqi_year_deviation_response_relaxed", Metric::Dqi, PeriodKind::Year,
                 FilterSpec::parse("opponent-deviation-response", 1, relaxed_prefix), false});
  t.push_back({"novelty_year_novel_differs", Metric::Novelty, PeriodKind::Year, FilterSpec::parse("novel-differs-from-ai"), false});
  t.push_back({"novelty_year_novel_matches", Metric::Novelty, PeriodKind::Year, FilterSpec::parse("novel-matches-ai"), false});
  if (with_injected) {
    t.push_back({"novelty_year_injected", Metric::Novelty, PeriodKind::Year, {}, true});
    t.push_back({"novelty_month_injected", Metric::Novelty, PeriodKind::Month, {}, true});
  }
  return t;
}

}  // namespace gocf
