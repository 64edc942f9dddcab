#pragma once

#include <json.hpp>

#include "gocf/corpus/game_record.hpp"

namespace gocf {

using json = nlohmann::ordered_json;

inline json to_json(const GameRecord& g) {
  json setup = json::array();
  for (const auto& s : g.setup_stones) setup.push_back({std::string(1, color_letter(s.color)), s.point.to_sgf()});
  json moves = json::array();
  for (const auto& m : g.moves)
    moves.push_back({{"number", m.number}, {"color", std::string(1, color_letter(m.color))}, {"point", m.point.to_sgf()}});
  json j = {{"game_id", g.game_id},
            {"date", g.has_date() ? g.date.to_string() : ""},
            {"black_id", g.black_id},
            {"white_id", g.white_id},
            {"result", to_string(g.result)},
            {"komi", g.komi.points()},
            {"board_size", g.board_size},
            {"setup_stones", std::move(setup)},
            {"moves", std::move(moves)},
            {"source_path", g.source_path}};
  if (g.is_synthetic) j["is_synthetic"] = true;
  return j;
}

inline GameRecord record_from_json(const json& j) {
  GameRecord g;
  g.game_id = j.at("game_id").get<std::string>();
  if (const auto ds = j.at("date").get<std::string>(); !ds.empty()) {
    auto d = Date::parse_lenient(ds);
    if (!d) throw std::runtime_error("bad date in record " + g.game_id);
    g.date = *d;
  }
  g.black_id = j.at("black_id").get<std::string>();
  g.white_id = j.at("white_id").get<std::string>();
  g.result = parse_game_result(j.at("result").get<std::string>());
  g.komi = Komi::from_points(j.at("komi").get<double>());
  g.board_size = j.at("board_size").get<int>();
  for (const auto& s : j.at("setup_stones")) {
    auto p = Point::from_sgf(s.at(1).get<std::string>());
    if (!p) throw std::runtime_error("bad setup point in record " + g.game_id);
    g.setup_stones.push_back({parse_color(s.at(0).get<std::string>()), *p});
  }
  for (const auto& m : j.at("moves")) {
    auto p = Point::from_sgf(m.at("point").get<std::string>());
    if (!p) throw std::runtime_error("bad move point in record " + g.game_id);
    g.moves.push_back({m.at("number").get<int>(), parse_color(m.at("color").get<std::string>()), *p});
  }
  g.source_path = j.at("source_path").get<std::string>();
  g.is_synthetic = j.value("is_synthetic", false);
  return g;
}

}  // namespace gocf
