#pragma once

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gocf/corpus/game_record.hpp"
#include "gocf/corpus/validate.hpp"
#include "gocf/rules/board.hpp"

namespace gocf {

using json = nlohmann::ordered_json;

enum class Ruleset : std::uint8_t { Japanese = 0, Chinese = 1 };

inline const char* to_string(Ruleset r) noexcept { return r == Ruleset::Chinese ? "chinese" : "japanese"; }

inline Ruleset parse_ruleset(std::string_view s) {
  if (s == "japanese") return Ruleset::Japanese;
  if (s == "chinese") return Ruleset::Chinese;
  throw std::invalid_argument("unknown ruleset '" + std::string(s) + "'");
}

struct PlayedMove {
  Color color = Color::Black;
  Point point;
  friend bool operator==(const PlayedMove&, const PlayedMove&) = default;
};

struct PositionQuery {
  std::vector<SetupStone> setup;
  std::vector<PlayedMove> moves;  // from the setup position
  Color to_move = Color::Black;
  Komi komi = Komi::from_points(6.5);
  Ruleset rules = Ruleset::Japanese;
  int visits = 50;
  // When nonempty the engine must evaluate exactly these moves.
  std::vector<Point> allow_moves;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Replays the query; throws PreconditionError if any move is illegal or the
// declared side to move disagrees with the replay.
inline Board replay(const PositionQuery& q) {
  Board b;
  for (const auto& s : q.setup) b.place_setup_stone(s.color, s.point);
  if (!q.setup.empty()) b.set_to_move(q.moves.empty() ? q.to_move : q.moves.front().color);
  for (std::size_t i = 0; i < q.moves.size(); ++i) {
    MoveError e = b.try_play(q.moves[i].color, q.moves[i].point);
    if (e != MoveError::None)
      throw PreconditionError("query move " + std::to_string(i + 1) + " is illegal: " + to_string(e));
  }
  if (b.to_move() != q.to_move) throw PreconditionError("query side to move disagrees with replay");
  if (q.visits < 1) throw PreconditionError("visits must be positive");
  return b;
}

struct MoveInfo {
  Point move;
  double winrate = 0.0;
  int visits = 0;
  friend bool operator==(const MoveInfo&, const MoveInfo&) = default;
};

// Winrates are from the perspective of the side to move.
struct Evaluation {
  Point best_move;
  std::vector<MoveInfo> move_infos;  // best first
  int visits_used = 0;
  std::string engine_id;

  std::optional<double> winrate_of(Point p) const {
    for (const auto& m : move_infos)
      if (m.move == p) return m.winrate;
    return std::nullopt;
  }
  double best_winrate() const { return move_infos.front().winrate; }

  friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(const std::string& what, std::string raw) : std::runtime_error(what), raw_(std::move(raw)) {}
  const std::string& raw_line() const noexcept { return raw_; }

 private:
  std::string raw_;
};

namespace wire {

inline std::string move_text(Point p) { return p.is_pass() ? "pass" : p.to_sgf(); }

inline Point parse_move(const std::string& s) {
  auto p = Point::from_sgf(s);
  if (!p) throw std::invalid_argument("bad move '" + s + "'");
  return *p;
}

inline json encode_request(const std::string& id, const PositionQuery& q) {
  json moves = json::array();
  for (const auto& m : q.moves) moves.push_back({std::string(1, color_letter(m.color)), move_text(m.point)});
  json j = {{"id", id}, {"moves", std::move(moves)}};
  if (!q.setup.empty()) {
    json stones = json::array();
    for (const auto& s : q.setup) stones.push_back({std::string(1, color_letter(s.color)), move_text(s.point)});
    j["initialStones"] = std::move(stones);
    j["initialPlayer"] = std::string(1, color_letter(q.moves.empty() ? q.to_move : q.moves.front().color));
  }
  j["rules"] = to_string(q.rules);
  j["komi"] = q.komi.points();
  j["boardXSize"] = kBoardSize;
  j["boardYSize"] = kBoardSize;
  j["maxVisits"] = q.visits;
  j["includePolicy"] = false;
  if (!q.allow_moves.empty()) {
    json mv = json::array();
    for (Point p : q.allow_moves) mv.push_back(move_text(p));
    j["allowMoves"] = json::array({{{"player", std::string(1, color_letter(q.to_move))},
                                    {"moves", std::move(mv)},
                                    {"untilDepth", 1}}});
  }
  return j;
}

inline PositionQuery decode_request(const json& j) {
  PositionQuery q;
  if (j.contains("initialStones"))
    for (const auto& s : j.at("initialStones"))
      q.setup.push_back({parse_color(s.at(0).get<std::string>()), parse_move(s.at(1).get<std::string>())});
  for (const auto& m : j.at("moves"))
    q.moves.push_back({parse_color(m.at(0).get<std::string>()), parse_move(m.at(1).get<std::string>())});
  if (!q.moves.empty()) q.to_move = opponent(q.moves.back().color);
  else if (j.contains("initialPlayer")) q.to_move = parse_color(j.at("initialPlayer").get<std::string>());
  q.rules = parse_ruleset(j.value("rules", std::string("japanese")));
  q.komi = Komi::from_points(j.value("komi", 6.5));
  q.visits = j.value("maxVisits", 50);
  if (j.contains("allowMoves"))
    for (const auto& block : j.at("allowMoves"))
      for (const auto& m : block.at("moves")) q.allow_moves.push_back(parse_move(m.get<std::string>()));
  return q;
}

inline json encode_response(const std::string& id, const Evaluation& e, int turn_number) {
  json infos = json::array();
  int order = 0;
  for (const auto& m : e.move_infos)
    infos.push_back({{"move", move_text(m.move)}, {"winrate", m.winrate}, {"visits", m.visits}, {"order", order++}});
  return {{"id", id}, {"turnNumber", turn_number}, {"moveInfos", std::move(infos)}};
}

// Parses an analysis response. `black_perspective` flips winrates for
// White-to-move positions when the engine reports them from Black's side.
inline Evaluation decode_response(const json& j, const std::string& raw, const std::string& engine_id,
                                  Color to_move, bool black_perspective) {
  Evaluation e;
  e.engine_id = engine_id;
  try {
    for (const auto& mi : j.at("moveInfos")) {
      MoveInfo info;
      info.move = parse_move(mi.at("move").get<std::string>());
      info.winrate = mi.at("winrate").get<double>();
      if (black_perspective && to_move == Color::White) info.winrate = 1.0 - info.winrate;
      info.visits = mi.value("visits", 0);
      if (!(info.winrate >= 0.0 && info.winrate <= 1.0)) throw ProtocolError("winrate outside [0,1]", raw);
      e.visits_used += info.visits;
      e.move_infos.push_back(info);
    }
  } catch (const ProtocolError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ProtocolError(std::string("malformed engine response: ") + ex.what(), raw);
  }
  if (e.move_infos.empty()) throw ProtocolError("engine response has no moveInfos", raw);
  std::stable_sort(e.move_infos.begin(), e.move_infos.end(),
                   [](const MoveInfo& a, const MoveInfo& b) { return a.winrate > b.winrate; });
  e.best_move = e.move_infos.front().move;
  return e;
}

}  // namespace wire

// Query for the position before move `upto` (0-based count of moves
// already played) of a game.
inline PositionQuery position_before(const GameRecord& g, std::size_t upto, Komi komi, Ruleset rules, int visits) {
  PositionQuery q;
  q.setup = g.setup_stones;
  q.moves.reserve(upto);
  for (std::size_t i = 0; i < upto; ++i) q.moves.push_back({g.moves[i].color, g.moves[i].point});
  if (upto < g.moves.size()) q.to_move = g.moves[upto].color;
  else q.to_move = upto == 0 ? Color::Black : opponent(g.moves[upto - 1].color);
  q.komi = komi;
  q.rules = rules;
  q.visits = visits;
  return q;
}

}  // namespace gocf
