#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gocf/core/csv.hpp"
#include "gocf/stats/panel.hpp"

namespace gocf::stats {

// One move decision as a regression row.
struct MoveObservation {
  std::string game_id;
  int move_number = 0;
  std::string player_id;
  std::string opponent_id;
  Color color = Color::Black;
  std::optional<Date> date;
  std::optional<int> month_id;  // year * 12 + month - 1
  double dqi = 0.0;
  bool matched_ai = false;
  bool novelty_dummy = false;
  std::optional<int> novelty_index;  // the game's index, on every row of the game
  std::optional<bool> after_ai;
};

inline const std::vector<std::string>& observation_header() {
  static const std::vector<std::string> h = {"game_id",    "move_number", "player_id",     "opponent_id",
                                             "color",      "date",        "month_id",      "dqi",
                                             "matched_ai", "novelty_dummy", "novelty_index"};
  return h;
}

inline csv::Writer observations_csv(std::span<const MoveObservation> rows) {
  csv::Writer w(observation_header());
  for (const auto& o : rows)
    w.row({o.game_id, std::to_string(o.move_number), o.player_id, o.opponent_id, std::string(1, color_letter(o.color)),
           o.date ? o.date->to_string() : "", o.month_id ? period_label(*o.month_id, PeriodKind::Month) : "",
           csv::fmt(o.dqi, 7), o.matched_ai ? "1" : "0", o.novelty_dummy ? "1" : "0",
           o.novelty_index ? std::to_string(*o.novelty_index) : ""});
  return w;
}

inline bool parse_flag(const std::string& s) {
  if (s == "1" || s == "true" || s == "TRUE" || s == "True") return true;
  if (s == "0" || s == "false" || s == "FALSE" || s == "False" || s.empty()) return false;
  return csv::to_double(s) != 0.0;
}

// Reads observation rows. Required columns: player_id, move_number, dqi,
// novelty_dummy. after_ai comes from `cutoff` applied to `date` when both
// exist, otherwise from an after_ai column. month_id accepts "YYYY-MM" or an
// integer code.
inline std::vector<MoveObservation> read_observations(const csv::Table& t, std::optional<Date> cutoff = {}) {
  const auto c_player = t.col("player_id"), c_move = t.col("move_number"), c_dqi = t.col("dqi"),
             c_nov = t.col("novelty_dummy");
  const auto c_game = t.find("game_id"), c_opp = t.find("opponent_id"), c_color = t.find("color"),
             c_date = t.find("date"), c_month = t.find("month_id"), c_match = t.find("matched_ai"),
             c_idx = t.find("novelty_index"), c_after = t.find("after_ai");
  std::vector<MoveObservation> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    MoveObservation o;
    o.player_id = r[c_player];
    o.move_number = static_cast<int>(csv::to_double(r[c_move]));
    o.dqi = csv::to_double(r[c_dqi]);
    o.novelty_dummy = parse_flag(r[c_nov]);
    if (c_game) o.game_id = r[*c_game];
    if (c_opp) o.opponent_id = r[*c_opp];
    if (c_color && !r[*c_color].empty()) o.color = parse_color(r[*c_color]);
    if (c_date && !r[*c_date].empty()) o.date = Date::parse_lenient(r[*c_date]);
    if (c_month && !r[*c_month].empty()) {
      const auto& m = r[*c_month];
      o.month_id = m.find('-') != std::string::npos ? parse_period_label(m, PeriodKind::Month)
                                                    : static_cast<int>(csv::to_int(m));
    } else if (o.date) {
      o.month_id = period_of(*o.date, PeriodKind::Month);
    }
    if (c_match) o.matched_ai = parse_flag(r[*c_match]);
    if (c_idx && !r[*c_idx].empty()) o.novelty_index = static_cast<int>(csv::to_double(r[*c_idx]));
    if (cutoff && o.date) o.after_ai = o.date->ordinal() >= cutoff->ordinal();
    else if (c_after && !r[*c_after].empty()) o.after_ai = parse_flag(r[*c_after]);
    out.push_back(std::move(o));
  }
  return out;
}

struct Table1Result {
  int model = 1;
  RegressionResult fit;
};

inline constexpr const char* kAfterAi = "after_ai";
inline constexpr const char* kNovelty = "novelty_dummy";
inline constexpr const char* kInteraction = "after_ai_x_novelty";

// Model 1: DQI on After-AI, Novelty and their interaction, absorbing move
// number and player. Model 2 drops the After-AI main effect and also
// absorbs month. Errors clustered by player.
inline Table1Result table1_model(std::span<const MoveObservation> obs, int model, const FeOptions& opt = {}) {
  if (model != 1 && model != 2) throw std::invalid_argument("table1 model must be 1 or 2");
  if (obs.empty()) throw EstimationError("table1: no observations");
  FeProblem p;
  std::vector<double> after, nov, inter;
  std::vector<std::string> players;
  std::vector<int> moves, months;
  for (const auto& o : obs) {
    if (!o.after_ai) throw EstimationError("table1: observation without after_ai (missing date/cutoff)");
    if (model == 2 && !o.month_id) throw EstimationError("table1 model 2: observation without month_id");
    p.y.push_back(o.dqi);
    const double a = *o.after_ai ? 1.0 : 0.0, nv = o.novelty_dummy ? 1.0 : 0.0;
    after.push_back(a);
    nov.push_back(nv);
    inter.push_back(a * nv);
    players.push_back(o.player_id);
    moves.push_back(o.move_number);
    if (model == 2) months.push_back(*o.month_id);
    p.cluster.push_back(o.player_id);
  }
  if (model == 1) {
    p.names.push_back(kAfterAi);
    p.x.push_back(std::move(after));
  }
  p.names.push_back(kNovelty);
  p.x.push_back(std::move(nov));
  p.names.push_back(kInteraction);
  p.x.push_back(std::move(inter));
  if (model == 2) p.absorb.push_back(FactorDim::encode("month", months));
  p.absorb.push_back(FactorDim::encode("move_number", moves));
  p.absorb.push_back(FactorDim::encode("player", players));
  FeOptions o = opt;
  o.drop_collinear = false;
  return {model, fe_regression(p, o)};
}

inline csv::Writer table1_csv(const Table1Result& t) {
  csv::Writer w({"term", "estimate", "se", "stars", "ci_low", "ci_high"});
  for (std::size_t i = 0; i < t.fit.names.size(); ++i) {
    const double b = t.fit.coef(static_cast<Eigen::Index>(i)), se = t.fit.se(static_cast<Eigen::Index>(i));
    w.row({t.fit.names[i], csv::fmt(b, 8), csv::fmt(se, 8), stars(b, se), csv::fmt(b - 1.96 * se, 8),
           csv::fmt(b + 1.96 * se, 8)});
  }
  w.row({"fe_month", t.model == 2 ? "Yes" : "No", "", "", "", ""});
  w.row({"fe_move_number", "Yes", "", "", "", ""});
  w.row({"fe_player", "Yes", "", "", "", ""});
  w.row({"n_obs", std::to_string(t.fit.n_obs), "", "", "", ""});
  w.row({"n_clusters", std::to_string(t.fit.n_clusters), "", "", "", ""});
  return w;
}

inline csv::Writer trend_csv(const TrendSeries& s) {
  csv::Writer w({"period", "effect", "ci_low", "ci_high"});
  for (const auto& p : s.points)
    w.row({period_label(p.period, s.kind), csv::fmt(p.effect, 8), csv::fmt(p.ci_low, 8), csv::fmt(p.ci_high, 8)});
  return w;
}

}  // namespace gocf::stats
