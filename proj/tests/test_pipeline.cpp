#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "gocf/corpus/sgf.hpp"
#include "gocf/pipeline/run.hpp"
#include "gocf/synth/corpus_gen.hpp"
#include "test_util.hpp"

using namespace gocf;
namespace fs = std::filesystem;

namespace {

std::vector<MoveObservation> game_rows(const std::string& id, const std::vector<bool>& matched) {
  std::vector<MoveObservation> out;
  for (std::size_t i = 0; i < matched.size(); ++i) {
    MoveObservation o;
    o.game_id = id;
    o.move_number = static_cast<int>(i) + 1;
    o.player_id = i % 2 ? "w" : "b";
    o.matched_ai = matched[i];
    out.push_back(o);
  }
  return out;
}

const MoveObservation* row_at(const std::vector<MoveObservation>& rows, const std::string& game, int move) {
  for (const auto& r : rows)
    if (r.game_id == game && r.move_number == move) return &r;
  return nullptr;
}

// Stated directly from the definition, one row at a time.
bool naive_keep(const std::vector<MoveObservation>& rows, const MoveObservation& r, const FilterSpec& f) {
  switch (f.kind) {
    case FilterKind::All: return true;
    case FilterKind::DiffersFromAi: return !r.matched_ai;
    case FilterKind::MatchesAi: return r.matched_ai;
    case FilterKind::StageBucket: return (r.move_number - 1) / 10 + 1 == f.bucket;
    case FilterKind::NovelMovesOnly: return r.novelty_dummy;
    case FilterKind::NovelDiffersFromAi: return r.novelty_dummy && !r.matched_ai;
    case FilterKind::NovelMatchesAi: return r.novelty_dummy && r.matched_ai;
    case FilterKind::OpponentDeviationResponse: {
      const int dev = r.move_number - 1;
      const auto* d = row_at(rows, r.game_id, dev);
      if (!d || d->matched_ai) return false;
      const int first = f.min_matched_prefix > 0 ? dev - f.min_matched_prefix : 1;
      if (first < 1) return false;
      for (int k = first; k < dev; ++k) {
        const auto* p = row_at(rows, r.game_id, k);
        if (!p || !p->matched_ai) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

TEST(Filter, DeviationResponseSelectsTheReply) {
  // dd and pp match the engine, dp deviates, pd answers the deviation.
  auto rows = game_rows("g", {true, true, false, true});
  auto got = apply_filter(rows, FilterSpec::parse("opponent-deviation-response"));
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].move_number, 4);

  auto all_matched = game_rows("h", {true, true, true, true});
  EXPECT_TRUE(apply_filter(all_matched, FilterSpec::parse("differs-from-ai")).empty());
  EXPECT_TRUE(apply_filter(all_matched, FilterSpec::parse("opponent-deviation-response")).empty());

  // The miss at move 1 rules out the later deviation for the strict variant
  // but not for the relaxed one.
  auto late = game_rows("k", {false, true, true, true, true, false, true});
  auto strict = apply_filter(late, FilterSpec::parse("opponent-deviation-response"));
  ASSERT_EQ(strict.size(), 1u);
  EXPECT_EQ(strict[0].move_number, 2);
  auto relaxed = apply_filter(late, FilterSpec::parse("opponent-deviation-response", 1, 3));
  ASSERT_EQ(relaxed.size(), 1u);
  EXPECT_EQ(relaxed[0].move_number, 7);
  EXPECT_THROW(FilterSpec::parse("stage-bucket", 7), std::invalid_argument);
  EXPECT_THROW(FilterSpec::parse("nonsense"), std::invalid_argument);
}

TEST(Filter, AllKindsMatchNaivePredicates) {
  std::mt19937_64 rng(3);
  std::vector<MoveObservation> rows;
  for (int g = 0; g < 200; ++g) {
    const double p = 0.3 + 0.65 * (g % 5) / 4.0;
    std::vector<bool> m;
    for (int k = 0; k < 60; ++k) m.push_back(std::bernoulli_distribution(p)(rng));
    auto gr = game_rows("g" + std::to_string(g), m);
    const int novel = 1 + static_cast<int>(rng() % 60);
    for (auto& r : gr) r.novelty_dummy = r.move_number == novel;
    rows.insert(rows.end(), gr.begin(), gr.end());
  }
  std::vector<FilterSpec> specs;
  for (const char* k : {"all", "differs-from-ai", "matches-ai", "novel-moves-only", "novel-differs-from-ai",
                        "novel-matches-ai", "opponent-deviation-response"})
    specs.push_back(FilterSpec::parse(k));
  for (int b = 1; b <= 6; ++b) specs.push_back(FilterSpec::parse("stage-bucket", b));
  for (int l : {1, 3, 8}) specs.push_back(FilterSpec::parse("opponent-deviation-response", 1, l));

  for (const auto& f : specs) {
    auto got = apply_filter(rows, f);
    std::vector<std::pair<std::string, int>> want, have;
    for (const auto& r : rows)
      if (naive_keep(rows, r, f)) want.emplace_back(r.game_id, r.move_number);
    for (const auto& r : got) have.emplace_back(r.game_id, r.move_number);
    EXPECT_EQ(have, want) << static_cast<int>(f.kind) << " " << f.min_matched_prefix;
  }

  const auto differs = apply_filter(rows, FilterSpec::parse("differs-from-ai")).size();
  const auto matches = apply_filter(rows, FilterSpec::parse("matches-ai")).size();
  EXPECT_EQ(differs + matches, rows.size());
  std::size_t buckets = 0;
  for (int b = 1; b <= 6; ++b) buckets += apply_filter(rows, FilterSpec::parse("stage-bucket", b)).size();
  EXPECT_EQ(buckets, rows.size());
  EXPECT_EQ(apply_filter(rows, FilterSpec::parse("novel-differs-from-ai")).size() +
                apply_filter(rows, FilterSpec::parse("novel-matches-ai")).size(),
            apply_filter(rows, FilterSpec::parse("novel-moves-only")).size());
}

TEST(Join, AttachesNoveltyAndRejectsDanglingGames) {
  std::vector<DecisionEval> evals(3);
  for (int i = 0; i < 3; ++i) {
    evals[i].game_id = "a";
    evals[i].move_number = i + 1;
    evals[i].dqi = 90 + i;
  }
  std::vector<NoveltyRecord> nov = {{"a", Date{2017, 5, 0}, 2, 58, false}};
  auto rows = join_observations(evals, nov);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_FALSE(rows[0].novelty_dummy);
  EXPECT_TRUE(rows[1].novelty_dummy);
  EXPECT_EQ(rows[2].novelty_index, 58);
  EXPECT_EQ(rows[0].month_id, 2017 * 12 + 4);
  evals.push_back(evals[0]);
  evals.back().game_id = "missing";
  EXPECT_THROW(join_observations(evals, nov), JoinError);
}

namespace {

std::vector<std::pair<double, double>> circles(const std::string& svg) {
  std::vector<std::pair<double, double>> out;
  static const std::regex re("<circle class=\"point\" cx=\"([0-9.]+)\" cy=\"([0-9.]+)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
    out.emplace_back(std::stod((*it)[1]), std::stod((*it)[2]));
  return out;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Report, TwoPointChartGeometry) {
  ChartSeries s;
  s.title = "demo";
  s.rows = {{"2000", 2000, 0.0, 0.0, 0.0}, {"2001", 2001, 1.0, 0.5, 1.5}};
  s.baseline_x = 2000;
  const std::string svg = render_trend_svg(s);
  EXPECT_EQ(count(svg, "<circle"), 2u);
  EXPECT_EQ(count(svg, "class=\"ci-band\""), 1u);
  EXPECT_EQ(count(svg, "class=\"baseline\""), 1u);
  EXPECT_EQ(svg, render_trend_svg(s));
  // Plot area x in [70, 700], y in [40, 340]; y range [0, 1.5] padded by 5%.
  auto c = circles(svg);
  ASSERT_EQ(c.size(), 2u);
  const double lo = -0.075, hi = 1.575;
  auto py = [&](double y) { return 40 + (hi - y) / (hi - lo) * 300; };
  EXPECT_NEAR(c[0].first, 70, 0.006);
  EXPECT_NEAR(c[1].first, 700, 0.006);
  EXPECT_NEAR(c[0].second, py(0.0), 0.006);
  EXPECT_NEAR(c[1].second, py(1.0), 0.006);

  ChartSeries empty;
  empty.title = "nothing";
  const std::string none = render_trend_svg(empty);
  EXPECT_NE(none.find("no data"), std::string::npos);
  EXPECT_EQ(count(none, "<circle"), 0u);
}

TEST(Report, ChartFromCsvPlacesBaselineAndCutoff) {
  auto t = csv::parse("period,effect,ci_low,ci_high\n2015-01,0,0,0\n2016-06,2,1,3\n");
  auto s = chart_from_trend_csv(t, "m", Date{2016, 3, 15});
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_DOUBLE_EQ(*s.baseline_x, (2015 * 12) / 12.0);
  EXPECT_DOUBLE_EQ(*s.cutoff_x, (2016 * 12 + 2) / 12.0);
  EXPECT_DOUBLE_EQ(s.rows[1].x, (2016 * 12 + 5) / 12.0);
}

namespace {

json small_config(const fs::path& corpus, const fs::path& out) {
  return json{{"corpus", corpus.string()},
              {"out", out.string()},
              {"seed", 5},
              {"engine", {{"command", "mock"}}},
              {"selfplay", {{"games", 4}, {"inject_date", "2016-03-14"}}},
              {"regress", {{"cutoff", "2016-03-15"}, {"baseline_year", 1950}, {"relaxed_prefix", 3}}}};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), root).generic_string();
    if (rel == Pipeline::kManifest || rel.find("cache/") == 0 || rel == "corpus/manifest.json") continue;
    out[rel] = read_file(e.path());
  }
  return out;
}

}  // namespace

TEST(Pipeline, RerunSkipsAndCutoffChangeRerunsOnlyDownstream) {
  spdlog::set_level(spdlog::level::warn);
  testutil::TempDir t("pipe");
  synth::CorpusGenOptions opt;
  opt.n_games = 80;
  for (const auto& g : synth::generate_corpus(opt, 6)) write_file(t / "corpus" / g.source_path, write_sgf(g));
  const json j = small_config(t / "corpus", t / "out");

  auto first = Pipeline(RunConfig::from_json(j, t.path())).run();
  ASSERT_TRUE(first.ok);
  for (const auto& s : first.stages) EXPECT_EQ(s.status, "ok") << s.name << " " << s.error;
  const auto before = snapshot(t / "out");
  EXPECT_TRUE(before.contains("results/table1_m1.csv"));
  EXPECT_TRUE(before.contains("figures/trend_dqi_year.svg"));

  // Manifest row counts agree with the files.
  const json manifest = json::parse(read_file(t / "out" / Pipeline::kManifest));
  const auto& nov = manifest.at("stages").at("novelty").at("outputs").at("novelty/novelty.csv");
  EXPECT_EQ(nov.at("rows").get<std::size_t>(), csv::load(t / "out/novelty/novelty.csv").rows.size());
  EXPECT_EQ(csv::load(t / "out/novelty/novelty.csv").rows.size(), 80u);

  auto second = Pipeline(RunConfig::from_json(j, t.path())).run();
  EXPECT_EQ(second.executed(), 0u);
  for (const auto& s : second.stages) EXPECT_EQ(s.status, "skipped") << s.name;
  EXPECT_EQ(snapshot(t / "out"), before);

  json moved = j;
  moved["regress"]["cutoff"] = "2017-01-01";
  auto third = Pipeline(RunConfig::from_json(moved, t.path())).run();
  std::set<std::string> ran;
  for (const auto& s : third.stages)
    if (s.status == "ok") ran.insert(s.name);
  EXPECT_EQ(ran, (std::set<std::string>{"regress", "report"}));

  auto forced = Pipeline(RunConfig::from_json(j, t.path())).run({.force = true});
  EXPECT_EQ(forced.executed(), forced.stages.size());
  EXPECT_EQ(snapshot(t / "out"), before);
}

TEST(Pipeline, ConfigErrors) {
  testutil::TempDir t("cfg");
  json j = small_config(t / "c", t / "o");
  j["regres"] = json::object();
  EXPECT_THROW(RunConfig::from_json(j, t.path()), ConfigError);
  j = small_config(t / "c", t / "o");
  j["engine"]["visit"] = 3;
  EXPECT_THROW(RunConfig::from_json(j, t.path()), ConfigError);
  j = small_config(t / "c", t / "o");
  j["selfplay"]["inject_date"] = "2016-03-15";
  EXPECT_THROW(RunConfig::from_json(j, t.path()), ConfigError);
  j = small_config(t / "c", t / "o");
  j["regress"]["cutoff"] = "not a date";
  EXPECT_THROW(RunConfig::from_json(j, t.path()), ConfigError);
  j.erase("corpus");
  EXPECT_THROW(RunConfig::from_json(j, t.path()), ConfigError);
}
