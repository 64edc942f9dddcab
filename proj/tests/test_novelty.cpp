#include <gtest/gtest.h>

#include <random>

#include "gocf/novelty/novelty.hpp"
#include "gocf/synth/corpus_gen.hpp"
#include "gocf/testing/oracles.hpp"
#include "test_util.hpp"

using namespace gocf;

namespace {

std::vector<oracle::SeqGame> seqs(std::span<const GameRecord> games) {
  std::vector<oracle::SeqGame> out;
  for (const auto& g : games) out.push_back({g.moves});
  return out;
}

std::vector<std::string> prefix(const GameRecord& g, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(g.moves[i].point.to_sgf());
  return out;
}

}  // namespace

TEST(Novelty, FirstGameIsNovelAtMoveOne) {
  auto games = synth::generate_corpus({}, 1);
  auto b = build_prefix_index(games);
  EXPECT_EQ(b.records[0].novel_move_number, 1);
  EXPECT_EQ(b.records[0].novelty_index, 59);
}

TEST(Novelty, DivergenceAtMoveTen) {
  std::vector<std::string> a = {"pd", "dp", "pp", "dd", "fq", "cn", "dr", "qj", "nc", "qf", "ee"};
  std::vector<std::string> b = a;
  b[9] = "jj";
  std::vector<GameRecord> games = {testutil::game("a", Date{1990, 1, 1}, a), testutil::game("b", Date{1991, 1, 1}, b)};
  auto r = build_prefix_index(games).records;
  EXPECT_EQ(r[1].novel_move_number, 10);
  EXPECT_EQ(r[1].novelty_index, 50);
}

TEST(Novelty, IdenticalPrefixHasNoNovelMove) {
  std::vector<GameRecord> games = {testutil::game("a", Date{1990, 1, 1}, {"dd", "pp", "dp"}),
                                   testutil::game("b", Date{1991, 1, 1}, {"dd", "pp"})};
  auto r = build_prefix_index(games).records;
  EXPECT_FALSE(r[1].novel_move_number.has_value());
  EXPECT_FALSE(r[1].novelty_index.has_value());
}

TEST(Novelty, PassIsAToken) {
  std::vector<GameRecord> games = {testutil::game("a", Date{1990, 1, 1}, {"dd", "tt"}),
                                   testutil::game("b", Date{1991, 1, 1}, {"dd", "pp"})};
  EXPECT_EQ(build_prefix_index(games).records[1].novel_move_number, 2);
}

TEST(Novelty, RejectsUnsortedCorpus) {
  std::vector<GameRecord> games = {testutil::game("b", Date{1991, 1, 1}, {"dd"}),
                                   testutil::game("a", Date{1990, 1, 1}, {"pp"})};
  EXPECT_THROW(build_prefix_index(games), NoveltyError);
}

TEST(Novelty, MatchesPairwiseOracle) {
  for (std::uint64_t seed : {2u, 3u, 4u}) {
    synth::CorpusGenOptions opt;
    opt.n_games = 500;
    opt.min_len = 20;
    opt.replay_prob = 0.03;
    auto games = synth::generate_corpus(opt, seed);
    auto b = build_prefix_index(games);
    auto want = oracle::pairwise_novelty(seqs(games), 60);
    std::size_t bound = 0;
    for (std::size_t i = 0; i < games.size(); ++i) {
      ASSERT_EQ(b.records[i].novel_move_number, want[i]) << games[i].game_id;
      if (want[i]) EXPECT_EQ(*b.records[i].novelty_index + *want[i], 60);
      bound += std::min<std::size_t>(games[i].moves.size(), 60);
    }
    EXPECT_LE(b.index.size(), bound + 1);
  }
}

TEST(Novelty, DistinctDatePermutationInvariance) {
  synth::CorpusGenOptions opt;
  opt.n_games = 300;
  auto games = synth::generate_corpus(opt, 12);
  // Give every game a distinct day, then shuffle and resort.
  for (std::size_t i = 0; i < games.size(); ++i) {
    const std::chrono::sys_days d = std::chrono::sys_days{std::chrono::year{1960} / 1 / 1} + std::chrono::days{i};
    std::chrono::year_month_day ymd{d};
    games[i].date = Date{static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
                         static_cast<int>(static_cast<unsigned>(ymd.day()))};
  }
  auto base = build_prefix_index(games).records;
  std::mt19937_64 rng(5);
  auto shuffled = games;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::stable_sort(shuffled.begin(), shuffled.end(), corpus_less);
  EXPECT_EQ(build_prefix_index(shuffled).records, base);
}

TEST(Novelty, Distribution) {
  std::vector<GameRecord> all_new = {testutil::game("a", Date{1990, 1, 1}, {"dd"}),
                                     testutil::game("b", Date{1991, 1, 1}, {"pp"}),
                                     testutil::game("c", Date{1992, 1, 1}, {"dp"})};
  auto d = novelty_distribution(build_prefix_index(all_new).records);
  EXPECT_DOUBLE_EQ(d.cumulative_of_games[1], 1.0);
  EXPECT_EQ(d.move_reaching(1.0), 1);

  auto games = synth::generate_corpus({}, 21);
  auto recs = build_prefix_index(games).records;
  auto dist = novelty_distribution(recs);
  std::size_t sum = 0;
  for (int k = 1; k <= 60; ++k) sum += dist.count[k];
  std::size_t defined = 0;
  for (const auto& r : recs) defined += r.novel_move_number.has_value();
  EXPECT_EQ(sum, defined);
  EXPECT_EQ(dist.defined, defined);
  EXPECT_DOUBLE_EQ(dist.cumulative_of_novel[60], defined ? 1.0 : 0.0);
}

TEST(Novelty, CsvRoundTrip) {
  auto games = synth::generate_corpus({}, 9);
  auto recs = build_prefix_index(games).records;
  EXPECT_EQ(read_novelty_csv(csv::parse(novelty_csv(recs).str())), recs);
}

TEST(Injection, CopyOfLaterGameRemovesItsNovelMove) {
  auto games = synth::generate_corpus({}, 14);
  const auto before = build_prefix_index(games).records;
  GameRecord target;
  for (const auto& g : games)
    if (g.date.year >= 2017 && g.moves.size() >= 60) {
      target = g;
      break;
    }
  ASSERT_FALSE(target.game_id.empty());
  GameRecord copy = testutil::game("ai-copy", Date{}, prefix(target, 60));
  std::vector<GameRecord> synth = {copy};
  auto after = inject_synthetic_games(games, synth, Date{2016, 3, 14}, Date{2016, 3, 15});
  ASSERT_EQ(after.size(), games.size());
  for (std::size_t i = 0; i < games.size(); ++i) {
    if (games[i].game_id == target.game_id) {
      EXPECT_FALSE(after[i].novel_move_number.has_value());
    } else if (games[i].date.ordinal() < (Date{2016, 3, 14}).ordinal()) {
      EXPECT_EQ(after[i], before[i]);
    }
    // Monotonicity: novel moves only move later or vanish.
    if (after[i].novel_move_number && before[i].novel_move_number)
      EXPECT_GE(*after[i].novel_move_number, *before[i].novel_move_number);
    if (!before[i].novel_move_number) EXPECT_FALSE(after[i].novel_move_number.has_value());
  }
}

TEST(Injection, PrefixDisjointGamesChangeNothingBeyondMoveOne) {
  auto games = synth::generate_corpus({}, 15);
  const auto before = build_prefix_index(games).records;
  // Synthetic games that open with a first move no real game uses.
  std::set<Point> firsts;
  for (const auto& g : games) firsts.insert(g.moves[0].point);
  std::vector<GameRecord> synth;
  for (int i = 0; i < kNumPoints && synth.size() < 5; ++i) {
    Point p = Point::from_index(i);
    if (firsts.contains(p)) continue;
    synth.push_back(testutil::game("s" + std::to_string(i), Date{}, {p.to_sgf(), "jj", "kk"}));
  }
  ASSERT_EQ(synth.size(), 5u);
  auto after = inject_synthetic_games(games, synth, Date{2016, 3, 14}, Date{2016, 3, 15});
  for (std::size_t i = 0; i < games.size(); ++i)
    if (before[i].novel_move_number != 1) EXPECT_EQ(after[i], before[i]) << games[i].game_id;
}

TEST(Injection, MergedCorpusMatchesOracle) {
  synth::CorpusGenOptions opt;
  opt.n_games = 1000;
  auto real = synth::generate_corpus(opt, 16);
  opt.n_games = 600;
  auto ai = synth::generate_corpus(opt, 17);
  for (auto& g : ai) g.game_id = "ai/" + g.game_id;
  const Date when{2016, 3, 14};
  auto got = inject_synthetic_games(real, ai, when, Date{2016, 3, 15});

  std::vector<GameRecord> merged = real;
  for (auto g : ai) {
    g.is_synthetic = true;
    g.date = when;
    merged.push_back(g);
  }
  std::stable_sort(merged.begin(), merged.end(), corpus_less);
  auto want = oracle::pairwise_novelty(seqs(merged), 60);
  std::size_t j = 0;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (merged[i].is_synthetic) continue;
    ASSERT_EQ(got[j].game_id, merged[i].game_id);
    EXPECT_EQ(got[j].novel_move_number, want[i]) << merged[i].game_id;
    ++j;
  }
  EXPECT_EQ(j, real.size());
}

TEST(Injection, DateMustPrecedeCutoff) {
  auto games = synth::generate_corpus({}, 18);
  std::vector<GameRecord> none;
  EXPECT_THROW(inject_synthetic_games(games, none, Date{2016, 3, 15}, Date{2016, 3, 15}), NoveltyError);
}

TEST(Novelty, CanonicalizationMatchesSymmetricOpenings) {
  std::vector<GameRecord> games = {testutil::game("a", Date{1990, 1, 1}, {"dd", "pp", "dp"}),
                                   testutil::game("b", Date{1991, 1, 1}, {"pd", "dp", "pp"})};
  NoveltyOptions raw;
  EXPECT_EQ(build_prefix_index(games, raw).records[1].novel_move_number, 1);
  NoveltyOptions canon;
  canon.canonicalize = true;
  EXPECT_FALSE(build_prefix_index(games, canon).records[1].novel_move_number.has_value());
}
