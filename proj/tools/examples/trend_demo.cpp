// Player-fixed-effect trend on a toy panel where every player gains 2 points
// a year.
#include <iostream>
#include <random>

#include "gocf/stats/panel.hpp"

int main() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<gocf::stats::PanelInput> moves;
  for (int p = 0; p < 30; ++p)
    for (int year = 2010; year <= 2020; ++year)
      for (int k = 0; k < 5; ++k) moves.push_back({"p" + std::to_string(p), year, 80 + p + 2.0 * (year - 2010) + noise(rng)});
  auto panel = gocf::stats::aggregate_player_period(moves);
  auto s = gocf::stats::trend_series(panel, gocf::stats::PeriodKind::Year, 2010);
  for (const auto& pt : s.points)
    std::cout << pt.period << "  " << pt.effect << "  [" << pt.ci_low << ", " << pt.ci_high << "]\n";
}
