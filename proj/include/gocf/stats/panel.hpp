#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gocf/core/types.hpp"
#include "gocf/stats/regression.hpp"

namespace gocf::stats {

enum class PeriodKind { Year, Month };

inline PeriodKind parse_period_kind(std::string_view s) {
  if (s == "year") return PeriodKind::Year;
  if (s == "month") return PeriodKind::Month;
  throw std::invalid_argument("period must be 'year' or 'month', got '" + std::string(s) + "'");
}

// Year periods are the year; month periods are year * 12 + (month - 1).
// Year-precision dates fall into July (their resolved date).
inline int period_of(const Date& d, PeriodKind k) {
  auto ymd = d.resolved();
  const int y = static_cast<int>(ymd.year());
  if (k == PeriodKind::Year) return y;
  return y * 12 + static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
}

inline std::string period_label(int period, PeriodKind k) {
  char buf[16];
  if (k == PeriodKind::Year) std::snprintf(buf, sizeof buf, "%04d", period);
  else std::snprintf(buf, sizeof buf, "%04d-%02d", period / 12, period % 12 + 1);
  return buf;
}

inline int parse_period_label(std::string_view s, PeriodKind k) {
  auto d = Date::parse_lenient(s);
  if (!d) throw std::invalid_argument("bad period '" + std::string(s) + "'");
  if (k == PeriodKind::Month && d->month == 0) d->month = 1;
  return k == PeriodKind::Year ? d->year : d->year * 12 + d->month - 1;
}

struct PanelInput {
  std::string player_id;
  int period = 0;
  double value = 0.0;
};

struct PanelObservation {
  std::string player_id;
  int period = 0;
  double value = 0.0;  // median of the cell
  std::size_t n_underlying = 0;
  friend bool operator==(const PanelObservation&, const PanelObservation&) = default;
};

// Exact median; even counts take the midpoint of the two central values.
inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / 2.0;
}

// One row per (player, period) cell, ordered by player then period.
inline std::vector<PanelObservation> aggregate_player_period(std::span<const PanelInput> rows) {
  std::map<std::pair<std::string, int>, std::vector<double>> cells;
  for (const auto& r : rows) cells[{r.player_id, r.period}].push_back(r.value);
  std::vector<PanelObservation> out;
  out.reserve(cells.size());
  for (auto& [key, values] : cells) out.push_back({key.first, key.second, median(values), values.size()});
  return out;
}

struct TrendPoint {
  int period = 0;
  double effect = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct TrendSeries {
  PeriodKind kind = PeriodKind::Year;
  int baseline = 0;
  std::vector<TrendPoint> points;  // period order, baseline included
  std::vector<int> omitted;        // periods not identified after absorption
  RegressionResult fit;
};

// Regresses cell values on period indicators (baseline omitted) with player
// fixed effects absorbed and player-clustered errors.
inline TrendSeries trend_series(std::span<const PanelObservation> panel, PeriodKind kind, int baseline,
                                const FeOptions& base_opt = {}) {
  std::vector<int> periods;
  for (const auto& o : panel) periods.push_back(o.period);
  std::sort(periods.begin(), periods.end());
  periods.erase(std::unique(periods.begin(), periods.end()), periods.end());
  if (!std::binary_search(periods.begin(), periods.end(), baseline))
    throw EstimationError("baseline period " + period_label(baseline, kind) + " not present in data");

  FeProblem p;
  std::vector<std::string> players;
  p.y.reserve(panel.size());
  for (const auto& o : panel) {
    p.y.push_back(o.value);
    players.push_back(o.player_id);
    p.cluster.push_back(o.player_id);
  }
  std::map<int, std::size_t> column_of;
  for (int per : periods) {
    if (per == baseline) continue;
    column_of[per] = p.names.size();
    p.names.push_back(period_label(per, kind));
    p.x.emplace_back(panel.size(), 0.0);
  }
  for (std::size_t i = 0; i < panel.size(); ++i)
    if (auto it = column_of.find(panel[i].period); it != column_of.end()) p.x[it->second][i] = 1.0;
  p.absorb.push_back(FactorDim::encode("player", players));

  FeOptions opt = base_opt;
  opt.drop_collinear = true;
  TrendSeries s;
  s.kind = kind;
  s.baseline = baseline;
  s.fit = fe_regression(p, opt);
  for (int per : periods) {
    if (per == baseline) {
      s.points.push_back({per, 0.0, 0.0, 0.0, 0.0});
      continue;
    }
    auto idx = s.fit.index_of(period_label(per, kind));
    if (!idx) {
      s.omitted.push_back(per);
      continue;
    }
    const double b = s.fit.coef(static_cast<Eigen::Index>(*idx)), se = s.fit.se(static_cast<Eigen::Index>(*idx));
    s.points.push_back({per, b, se, b - 1.96 * se, b + 1.96 * se});
  }
  return s;
}

}  // namespace gocf::stats
