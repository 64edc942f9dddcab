#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gocf/core/csv.hpp"
#include "gocf/corpus/game_record.hpp"
#include "gocf/novelty/prefix_index.hpp"

namespace gocf {

struct NoveltyRecord {
  std::string game_id;
  Date date;
  std::optional<int> novel_move_number;
  std::optional<int> novelty_index;
  bool is_synthetic = false;

  friend bool operator==(const NoveltyRecord&, const NoveltyRecord&) = default;
};

struct NoveltyOptions {
  int max_move = 60;
  // Match sequences up to the 8 board symmetries.
  bool canonicalize = false;
};

class NoveltyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dihedral symmetry k in 0..7 applied to a point.
constexpr Point transform_point(Point p, int k) noexcept {
  if (p.is_pass()) return p;
  int c = p.col(), r = p.row();
  constexpr int m = kBoardSize - 1;
  if (k & 1) c = m - c;
  if (k & 2) r = m - r;
  if (k & 4) std::swap(c, r);
  return Point(c, r);
}

// Streams the tokens of a game's prefix, optionally canonicalized. The
// canonical length-k prefix is the lexicographically smallest image of the
// raw length-k prefix under the 8 symmetries; it is built incrementally by
// keeping the set of symmetries that tie for the minimum so far.
class PrefixTokenizer {
 public:
  explicit PrefixTokenizer(bool canonicalize) : canonical_(canonicalize) { live_.fill(true); }

  PrefixToken next(const Move& m) {
    if (!canonical_) return make_token(m.color, m.point);
    int best = -1;
    std::array<int, 8> image{};
    for (int k = 0; k < 8; ++k) {
      if (!live_[k]) continue;
      image[k] = transform_point(m.point, k).index();
      if (best < 0 || image[k] < best) best = image[k];
    }
    for (int k = 0; k < 8; ++k)
      if (live_[k] && image[k] != best) live_[k] = false;
    return make_token(m.color, Point::from_index(best));
  }

 private:
  bool canonical_;
  std::array<bool, 8> live_{};
};

struct NoveltyBuild {
  PrefixIndex index;
  std::vector<NoveltyRecord> records;
};

// Processes games in corpus order. A game's novel move is the smallest k
// whose length-k prefix is absent from the index built from all earlier
// games; afterwards the game's prefixes (length <= max_move) are inserted.
inline NoveltyBuild build_prefix_index(std::span<const GameRecord> corpus, const NoveltyOptions& opt = {}) {
  for (std::size_t i = 1; i < corpus.size(); ++i)
    if (corpus_less(corpus[i], corpus[i - 1]))
      throw NoveltyError("corpus not sorted: '" + corpus[i].game_id + "' precedes '" + corpus[i - 1].game_id + "'");
  if (corpus.size() >= PrefixIndex::kAbsent) throw NoveltyError("corpus too large");

  NoveltyBuild out{PrefixIndex(opt.max_move), {}};
  std::size_t bound = 0;
  for (const auto& g : corpus) bound += std::min<std::size_t>(g.moves.size(), opt.max_move);
  out.index.reserve(bound);
  out.records.reserve(corpus.size());

  for (std::size_t gi = 0; gi < corpus.size(); ++gi) {
    const GameRecord& g = corpus[gi];
    NoveltyRecord rec{g.game_id, g.date, std::nullopt, std::nullopt, g.is_synthetic};
    PrefixTokenizer tok(opt.canonicalize);
    PrefixIndex::NodeId node = PrefixIndex::kRoot;
    const int len = static_cast<int>(std::min<std::size_t>(g.moves.size(), opt.max_move));
    for (int k = 1; k <= len; ++k) {
      bool created = false;
      node = out.index.insert(node, tok.next(g.moves[k - 1]), static_cast<std::uint32_t>(gi), &created);
      if (created && !rec.novel_move_number) {
        rec.novel_move_number = k;
        rec.novelty_index = opt.max_move - k;
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

// Merges AI-generated games into the corpus dated `position_date` (which
// must precede the After-AI cutoff), reruns the index, and returns records
// for the real games only.
inline std::vector<NoveltyRecord> inject_synthetic_games(std::span<const GameRecord> corpus,
                                                         std::span<const GameRecord> synthetic,
                                                         const Date& position_date, const Date& cutoff,
                                                         const NoveltyOptions& opt = {}) {
  if (position_date.ordinal() >= cutoff.ordinal())
    throw NoveltyError("injection date " + position_date.to_string() + " is not before the cutoff " +
                       cutoff.to_string());
  std::vector<GameRecord> merged(corpus.begin(), corpus.end());
  merged.reserve(corpus.size() + synthetic.size());
  for (const auto& s : synthetic) {
    GameRecord g = s;
    g.is_synthetic = true;
    g.date = position_date;
    merged.push_back(std::move(g));
  }
  std::stable_sort(merged.begin(), merged.end(), corpus_less);
  auto build = build_prefix_index(merged, opt);
  std::vector<NoveltyRecord> real;
  real.reserve(corpus.size());
  for (auto& r : build.records)
    if (!r.is_synthetic) real.push_back(std::move(r));
  return real;
}

struct NoveltyDistribution {
  int max_move = 60;
  std::size_t games = 0;
  std::size_t defined = 0;
  std::vector<std::size_t> count;                 // [k] for k in 1..max_move; index 0 unused
  std::vector<double> cumulative_of_games;        // share of all games novel by move k
  std::vector<double> cumulative_of_novel;        // share of defined novel moves at or before k
  double share_absent = 0.0;

  // Smallest k with cumulative_of_games >= q, if any.
  std::optional<int> move_reaching(double q) const {
    for (int k = 1; k <= max_move; ++k)
      if (cumulative_of_games[k] >= q) return k;
    return std::nullopt;
  }
};

inline NoveltyDistribution novelty_distribution(std::span<const NoveltyRecord> records, int max_move = 60) {
  if (records.empty()) throw NoveltyError("novelty_distribution: no records");
  NoveltyDistribution d;
  d.max_move = max_move;
  d.games = records.size();
  d.count.assign(max_move + 1, 0);
  for (const auto& r : records) {
    if (!r.novel_move_number) continue;
    if (*r.novel_move_number < 1 || *r.novel_move_number > max_move)
      throw NoveltyError("novel move number out of range in " + r.game_id);
    ++d.count[*r.novel_move_number];
    ++d.defined;
  }
  d.cumulative_of_games.assign(max_move + 1, 0.0);
  d.cumulative_of_novel.assign(max_move + 1, 0.0);
  std::size_t running = 0;
  for (int k = 1; k <= max_move; ++k) {
    running += d.count[k];
    d.cumulative_of_games[k] = static_cast<double>(running) / static_cast<double>(d.games);
    d.cumulative_of_novel[k] = d.defined ? static_cast<double>(running) / static_cast<double>(d.defined) : 0.0;
  }
  d.share_absent = static_cast<double>(d.games - d.defined) / static_cast<double>(d.games);
  return d;
}

inline csv::Writer novelty_csv(std::span<const NoveltyRecord> records) {
  csv::Writer w({"game_id", "date", "novel_move_number", "novelty_index", "is_synthetic"});
  for (const auto& r : records)
    w.row({r.game_id, r.date.to_string(), r.novel_move_number ? std::to_string(*r.novel_move_number) : "",
           r.novelty_index ? std::to_string(*r.novelty_index) : "", r.is_synthetic ? "1" : "0"});
  return w;
}

inline std::vector<NoveltyRecord> read_novelty_csv(const csv::Table& t) {
  const auto c_id = t.col("game_id"), c_date = t.col("date"), c_num = t.col("novel_move_number"),
             c_idx = t.col("novelty_index"), c_syn = t.col("is_synthetic");
  std::vector<NoveltyRecord> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    NoveltyRecord r;
    r.game_id = row[c_id];
    auto d = Date::parse_lenient(row[c_date]);
    if (!d) throw NoveltyError("bad date in novelty csv: " + row[c_date]);
    r.date = *d;
    if (!row[c_num].empty()) r.novel_move_number = static_cast<int>(csv::to_int(row[c_num]));
    if (!row[c_idx].empty()) r.novelty_index = static_cast<int>(csv::to_int(row[c_idx]));
    r.is_synthetic = row[c_syn] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace gocf
