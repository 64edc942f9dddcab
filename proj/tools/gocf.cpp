#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gocf/corpus/ingest.hpp"
#include "gocf/engine/evaluate.hpp"
#include "gocf/engine/selfplay.hpp"
#include "gocf/novelty/novelty.hpp"
#include "gocf/pipeline/analyses.hpp"
#include "gocf/pipeline/filter.hpp"
#include "gocf/pipeline/report_svg.hpp"
#include "gocf/pipeline/run.hpp"
#include "gocf/stats/table1.hpp"
#include "gocf/synth/corpus_gen.hpp"
#include "gocf/testing/oracles.hpp"

#ifndef GOCF_SOURCE_DIR
#define GOCF_SOURCE_DIR "."
#endif

namespace fs = std::filesystem;
using namespace gocf;

namespace {

std::optional<Date> date_arg(const std::string& s, const char* flag) {
  if (s.empty()) return std::nullopt;
  try {
    return Date::parse_iso(s);
  } catch (const std::invalid_argument&) {
    throw CLI::ValidationError(flag, "expected YYYY-MM-DD, got '" + s + "'");
  }
}

std::string env_or(const char* name, std::string fallback) {
  if (const char* e = std::getenv(name); e && *e) return e;
  return fallback;
}

// Games from a directory of SGF files and/or JSONL record files. Dates are
// optional; legality is checked by replay.
std::vector<GameRecord> read_game_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && (ingest_detail::has_ext(e.path(), ".sgf") || ingest_detail::has_ext(e.path(), ".jsonl"))) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<GameRecord> games;
  for (const auto& f : files) {
    if (ingest_detail::has_ext(f, ".jsonl")) {
      std::istringstream in(read_file(f));
      for (std::string line; std::getline(in, line);)
        if (!line.empty()) games.push_back(record_from_json(json::parse(line)));
    } else {
      for (auto& g : parse_sgf(read_file(f))) {
        if (g.game_id.empty()) g.game_id = fs::relative(f, dir).generic_string();
        games.push_back(std::move(g));
      }
    }
  }
  for (const auto& g : games) {
    Board b = initial_board(g);
    for (const auto& m : g.moves)
      if (b.try_play(m) != MoveError::None)
        throw std::runtime_error("game " + g.game_id + ": illegal move " + std::to_string(m.number));
  }
  return games;
}

struct EngineArgs {
  std::string command = env_or("GO_CF_ENGINE", "mock");
  int visits = 50;
  double komi = 6.5;
  std::string rules = "japanese";
  int max_in_flight = 16;
  double timeout_s = 300;
  bool black_perspective = false;
  std::size_t die_after = 0;

  void add(CLI::App* app) {
    app->add_option("--engine", command, "engine command line, or 'mock' (env GO_CF_ENGINE)");
    app->add_option("--visits", visits, "visits per position")->check(CLI::PositiveNumber);
    app->add_option("--komi", komi, "komi in points");
    app->add_option("--rules", rules, "japanese or chinese")->check(CLI::IsMember({"japanese", "chinese"}));
    app->add_option("--max-in-flight", max_in_flight, "pipelined requests")->check(CLI::PositiveNumber);
    app->add_option("--timeout", timeout_s, "per-response timeout in seconds");
    app->add_flag("--black-perspective", black_perspective, "engine reports winrates from Black's side");
    app->add_option("--die-after", die_after, "")->group("");  // test hook
  }
  EngineOptions options() const {
    EngineOptions o;
    o.command = command;
    o.max_in_flight = max_in_flight;
    o.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));
    o.black_perspective = black_perspective;
    if (die_after) o.die_after_requests = die_after;
    return o;
  }
};

int cmd_verify(const fs::path& corpus_dir, int n_eval_games);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Go decision-quality and novelty pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse an SGF corpus into a corpus database");
  std::string in_corpus, in_out, in_dmin, in_dmax;
  bool no_dedup = false, include_handicap = false;
  unsigned in_threads = 0;
  ingest->add_option("--corpus", in_corpus, "directory of SGF files / zip archives")->required();
  ingest->add_option("--out", in_out, "output database directory")->required();
  ingest->add_flag("--no-dedup", no_dedup, "keep exact duplicate games");
  ingest->add_flag("--include-handicap", include_handicap, "keep games with setup stones");
  ingest->add_option("--date-min", in_dmin, "earliest date kept (YYYY-MM-DD)");
  ingest->add_option("--date-max", in_dmax, "latest date kept (YYYY-MM-DD)");
  ingest->add_option("--threads", in_threads, "parser threads (0 = all cores)");

  // novelty
  auto* nov = app.add_subcommand("novelty", "first historically novel move of every game");
  std::string nv_db, nv_out, nv_inject, nv_inject_date, nv_cutoff = "2016-03-15", nv_dist;
  int nv_max = 60;
  bool nv_canon = false;
  nov->add_option("--db", nv_db, "corpus database")->required();
  nov->add_option("--out", nv_out, "novelty CSV")->required();
  nov->add_option("--max-move", nv_max, "prefix length cap")->check(CLI::PositiveNumber);
  nov->add_flag("--canonicalize", nv_canon, "match sequences up to the 8 board symmetries");
  nov->add_option("--inject", nv_inject, "directory of synthetic games (SGF or JSONL) to insert");
  nov->add_option("--inject-date", nv_inject_date, "date given to injected games");
  nov->add_option("--cutoff", nv_cutoff, "After-AI cutoff the injection date must precede");
  nov->add_option("--distribution", nv_dist, "also write the novel-move distribution CSV here");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "per-move DQI with an engine");
  std::string ev_db, ev_out, ev_cache = env_or("GO_CF_CACHE", "");
  int ev_max = 60;
  unsigned ev_workers = 1;
  EngineArgs ev_engine;
  evaluate->add_option("--db", ev_db, "corpus database")->required();
  evaluate->add_option("--out", ev_out, "evaluations CSV")->required();
  evaluate->add_option("--cache", ev_cache, "evaluation cache file (env GO_CF_CACHE)");
  evaluate->add_option("--max-move", ev_max, "evaluate moves 1..N")->check(CLI::PositiveNumber);
  evaluate->add_option("--workers", ev_workers, "engine instances")->check(CLI::PositiveNumber);
  ev_engine.add(evaluate);

  // selfplay
  auto* selfplay = app.add_subcommand("selfplay", "engine-vs-engine games for injection");
  std::string sp_out, sp_cache;
  int sp_games = 1, sp_max = 60, sp_topk = 5;
  std::uint64_t sp_seed = 1;
  double sp_temp = 0.02;
  EngineArgs sp_engine;
  selfplay->add_option("--games", sp_games, "number of games")->check(CLI::PositiveNumber);
  selfplay->add_option("--seed", sp_seed, "sampling seed");
  selfplay->add_option("--out", sp_out, "output directory (SGF files + games.jsonl)")->required();
  selfplay->add_option("--max-move", sp_max, "moves per game")->check(CLI::PositiveNumber);
  selfplay->add_option("--top-k", sp_topk, "candidates sampled per move")->check(CLI::PositiveNumber);
  selfplay->add_option("--temperature", sp_temp, "sampling temperature in winrate units")->check(CLI::PositiveNumber);
  selfplay->add_option("--cache", sp_cache, "evaluation cache file");
  sp_engine.add(selfplay);

  // regress
  auto* regress = app.add_subcommand("regress", "fixed-effects models");
  std::string rg_model = "table1-m1", rg_metric = "dqi", rg_period = "year", rg_cutoff = "2016-03-15", rg_baseline,
              rg_in, rg_out, rg_filter = "all";
  int rg_bucket = 1, rg_relaxed = 0;
  bool rg_both = false;
  std::vector<std::string> rg_rename;
  regress->add_option("--model", rg_model, "table1-m1, table1-m2 or trend")
      ->check(CLI::IsMember({"table1-m1", "table1-m2", "trend"}));
  regress->add_option("--metric", rg_metric, "dqi or novelty (trend)")->check(CLI::IsMember({"dqi", "novelty"}));
  regress->add_option("--period", rg_period, "year or month (trend)")->check(CLI::IsMember({"year", "month"}));
  regress->add_option("--cutoff", rg_cutoff, "After-AI cutoff date");
  regress->add_option("--baseline", rg_baseline, "baseline period, YYYY or YYYY-MM (default: earliest)");
  regress->add_option("--in", rg_in, "observations CSV")->required();
  regress->add_option("--out", rg_out, "output CSV")->required();
  regress->add_option("--filter", rg_filter, "row filter applied first");
  regress->add_option("--bucket", rg_bucket, "stage bucket for --filter stage-bucket");
  regress->add_option("--relaxed", rg_relaxed, "matched moves required before a deviation (0 = all)");
  regress->add_flag("--both-players", rg_both, "credit a game's novelty to both players");
  regress->add_option("--rename", rg_rename, "column rename FROM=TO applied to the input header");

  // filter
  auto* filter = app.add_subcommand("filter", "join evaluations with novelty and select rows");
  std::string fl_evals, fl_novelty, fl_in, fl_out, fl_kind = "all";
  int fl_bucket = 1, fl_relaxed = 0;
  filter->add_option("--evals", fl_evals, "evaluations CSV");
  filter->add_option("--novelty", fl_novelty, "novelty CSV");
  filter->add_option("--in", fl_in, "observations CSV (instead of --evals/--novelty)");
  filter->add_option("--kind", fl_kind, "filter kind");
  filter->add_option("--bucket", fl_bucket, "stage bucket 1..6");
  filter->add_option("--relaxed", fl_relaxed, "matched moves required before a deviation (0 = all)");
  filter->add_option("--out", fl_out, "observations CSV")->required();

  // report
  auto* report = app.add_subcommand("report", "SVG charts and summary from result CSVs");
  std::string rp_in, rp_out, rp_cutoff = "2016-03-15";
  report->add_option("--in", rp_in, "directory with trend_*.csv / table1*.csv")->required();
  report->add_option("--out", rp_out, "figure directory")->required();
  report->add_option("--cutoff", rp_cutoff, "After-AI cutoff drawn on the charts");

  // run
  auto* run = app.add_subcommand("run", "full pipeline from a config file");
  std::string rn_config, rn_out, rn_cutoff, rn_engine = env_or("GO_CF_ENGINE", "");
  std::optional<std::uint64_t> rn_seed;
  bool rn_force = false;
  run->add_option("--config", rn_config, "JSON config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", rn_out, "override output directory");
  run->add_option("--cutoff", rn_cutoff, "override regress.cutoff");
  run->add_option("--seed", rn_seed, "override seed");
  run->add_option("--engine", rn_engine, "override engine.command");
  run->add_flag("--force", rn_force, "rerun every stage");

  // verify
  auto* verify = app.add_subcommand("verify", "oracle checks over the bundled synthetic corpus");
  std::string vf_corpus = std::string(GOCF_SOURCE_DIR) + "/data/synthetic-300";
  int vf_games = 60;
  verify->add_option("--corpus", vf_corpus, "corpus directory");
  verify->add_option("--eval-games", vf_games, "games evaluated with the mock engine");

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic SGF corpus");
  std::string sy_out;
  int sy_games = 300;
  std::uint64_t sy_seed = 300;
  int sy_players = 30;
  synth->add_option("--out", sy_out, "output directory")->required();
  synth->add_option("--games", sy_games, "number of games")->check(CLI::PositiveNumber);
  synth->add_option("--players", sy_players, "number of players")->check(CLI::PositiveNumber);
  synth->add_option("--seed", sy_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("gocf"));
  spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (*ingest) {
      IngestConfig cfg;
      cfg.dedup = !no_dedup;
      cfg.include_handicap = include_handicap;
      cfg.date_min = date_arg(in_dmin, "--date-min");
      cfg.date_max = date_arg(in_dmax, "--date-max");
      cfg.threads = in_threads;
      CorpusDB db = ingest_corpus(in_corpus, cfg);
      db.config_hash = cfg.hash();
      db.save(in_out);
      const auto& s = db.stats;
      spdlog::info("ingest: {} files, {} games parsed, {} invalid, {} filtered, {} duplicates, {} kept", s.files_seen,
                   s.games_parsed, s.games_invalid, s.games_filtered, s.games_duplicate, s.games_kept);
      if (s.files_unreadable || s.files_unparseable)
        spdlog::warn("ingest: {} unreadable and {} unparseable files skipped", s.files_unreadable, s.files_unparseable);
    } else if (*nov) {
      CorpusDB db = CorpusDB::load(nv_db);
      NoveltyOptions opt{nv_max, nv_canon};
      std::vector<NoveltyRecord> records;
      if (!nv_inject.empty()) {
        auto when = date_arg(nv_inject_date, "--inject-date");
        if (!when) throw CLI::ValidationError("--inject-date", "required with --inject");
        auto synthetic = read_game_dir(nv_inject);
        records = inject_synthetic_games(db.games, synthetic, *when, *date_arg(nv_cutoff, "--cutoff"), opt);
        spdlog::info("novelty: injected {} synthetic games dated {}", synthetic.size(), when->to_string());
      } else {
        records = build_prefix_index(db.games, opt).records;
      }
      novelty_csv(records).save(nv_out);
      const auto dist = novelty_distribution(records, nv_max);
      spdlog::info("novelty: {} games, {} with a novel move, {:.1f}% of novel moves by move 9, share absent {:.4f}",
                   dist.games, dist.defined, 100.0 * dist.cumulative_of_novel[std::min(9, nv_max)], dist.share_absent);
      if (!nv_dist.empty()) {
        csv::Writer w({"move_number", "count", "cumulative_share_of_games", "cumulative_share_of_novel"});
        for (int k = 1; k <= nv_max; ++k)
          w.row({std::to_string(k), std::to_string(dist.count[k]), csv::fmt(dist.cumulative_of_games[k], 8),
                 csv::fmt(dist.cumulative_of_novel[k], 8)});
        w.save(nv_dist);
      }
    } else if (*evaluate) {
      CorpusDB db = CorpusDB::load(ev_db);
      EvalCache cache = ev_cache.empty() ? EvalCache() : EvalCache(fs::path(ev_cache));
      EvalConfig cfg;
      cfg.visits = ev_engine.visits;
      cfg.komi = Komi::from_points(ev_engine.komi);
      cfg.rules = parse_ruleset(ev_engine.rules);
      cfg.max_move = ev_max;
      auto evals = evaluate_games(db.games, ev_engine.options(), cache, cfg, ev_workers);
      csv::Writer w(decision_eval_header());
      append_decision_evals(w, evals);
      w.save(ev_out);
      const auto matched = std::count_if(evals.begin(), evals.end(), [](const DecisionEval& d) { return d.matched_ai; });
      spdlog::info("evaluate: {} decisions in {} games, {:.1f}% matched the engine", evals.size(), db.games.size(),
                   evals.empty() ? 0.0 : 100.0 * matched / evals.size());
    } else if (*selfplay) {
      EngineClient client = EngineClient::open(sp_engine.options());
      EvalCache cache = sp_cache.empty() ? EvalCache() : EvalCache(fs::path(sp_cache));
      Evaluator ev(client, cache);
      SelfplayConfig cfg;
      cfg.max_move = sp_max;
      cfg.visits = sp_engine.visits;
      cfg.komi = Komi::from_points(sp_engine.komi);
      cfg.rules = parse_ruleset(sp_engine.rules);
      cfg.top_k = sp_topk;
      cfg.temperature = sp_temp;
      auto games = selfplay_generate(ev, sp_games, sp_seed, cfg);
      fs::create_directories(sp_out);
      std::string lines;
      for (const auto& g : games) {
        write_file(fs::path(sp_out) / g.source_path, write_sgf(g));
        lines += to_json(g).dump() + "\n";
      }
      write_file(fs::path(sp_out) / "games.jsonl", lines);
      spdlog::info("selfplay: wrote {} of {} games to {}", games.size(), sp_games, sp_out);
      if (games.empty()) return 1;
    } else if (*regress) {
      std::string text = read_file(rg_in);
      csv::Table t = csv::parse(text);
      for (const auto& r : rg_rename) {
        const auto eq = r.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--rename", "expected FROM=TO, got '" + r + "'");
        auto col = t.find(r.substr(0, eq));
        if (!col) throw CLI::ValidationError("--rename", "no column '" + r.substr(0, eq) + "'");
        t.header[*col] = r.substr(eq + 1);
      }
      auto obs = stats::read_observations(t, date_arg(rg_cutoff, "--cutoff"));
      obs = apply_filter(obs, FilterSpec::parse(rg_filter, rg_bucket, rg_relaxed));
      if (rg_model == "trend") {
        const auto kind = stats::parse_period_kind(rg_period);
        std::optional<int> baseline;
        if (!rg_baseline.empty()) baseline = stats::parse_period_label(rg_baseline, kind);
        auto series = trend_for(obs, parse_metric(rg_metric), kind, baseline, rg_both);
        stats::trend_csv(series).save(rg_out);
        spdlog::info("regress: {} periods, baseline {}, {} omitted", series.points.size(),
                     stats::period_label(series.baseline, kind), series.omitted.size());
      } else {
        auto res = stats::table1_model(obs, rg_model == "table1-m1" ? 1 : 2);
        stats::table1_csv(res).save(rg_out);
        for (std::size_t i = 0; i < res.fit.names.size(); ++i)
          std::cout << res.fit.names[i] << " " << csv::fmt(res.fit.coef(static_cast<Eigen::Index>(i)), 5) << " ("
                    << csv::fmt(res.fit.se(static_cast<Eigen::Index>(i)), 5) << ")\n";
        std::cout << "n_obs " << res.fit.n_obs << "  clusters " << res.fit.n_clusters << "\n";
      }
    } else if (*filter) {
      std::vector<MoveObservation> rows;
      if (!fl_in.empty()) {
        rows = stats::read_observations(csv::load(fl_in));
      } else {
        if (fl_evals.empty() || fl_novelty.empty())
          throw CLI::ValidationError("filter", "give --in, or both --evals and --novelty");
        rows = join_observations(read_decision_evals(csv::load(fl_evals)), read_novelty_csv(csv::load(fl_novelty)));
      }
      auto kept = apply_filter(rows, FilterSpec::parse(fl_kind, fl_bucket, fl_relaxed));
      stats::observations_csv(kept).save(fl_out);
      spdlog::info("filter {}: kept {} of {} rows", fl_kind, kept.size(), rows.size());
    } else if (*report) {
      auto files = render_report(rp_in, rp_out, date_arg(rp_cutoff, "--cutoff"));
      spdlog::info("report: wrote {} files to {}", files.size(), rp_out);
    } else if (*run) {
      json j = json::parse(read_file(rn_config));
      if (!rn_out.empty()) j["out"] = fs::absolute(rn_out).string();
      if (!rn_cutoff.empty()) j["regress"]["cutoff"] = rn_cutoff;
      if (rn_seed) j["seed"] = *rn_seed;
      if (!rn_engine.empty()) j["engine"]["command"] = rn_engine;
      RunConfig cfg = RunConfig::from_json(j, fs::absolute(rn_config).parent_path());
      Pipeline p(cfg);
      RunSummary s = p.run({rn_force});
      for (const auto& st : s.stages)
        std::cout << st.name << ": " << st.status << (st.error.empty() ? "" : " (" + st.error + ")") << "\n";
      std::cout << "manifest: " << s.manifest.string() << "\n";
      return s.ok ? 0 : 1;
    } else if (*verify) {
      return cmd_verify(vf_corpus, vf_games);
    } else if (*synth) {
      synth::CorpusGenOptions opt;
      opt.n_games = sy_games;
      opt.n_players = sy_players;
      auto games = synth::generate_corpus(opt, sy_seed);
      fs::create_directories(sy_out);
      for (const auto& g : games) write_file(fs::path(sy_out) / g.source_path, write_sgf(g));
      spdlog::info("synth: wrote {} games to {}", games.size(), sy_out);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}

namespace {

int cmd_verify(const fs::path& corpus_dir, int n_eval_games) {
  int failures = 0;
  auto report = [&](bool ok, const std::string& name, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : ": " + detail) << "\n";
    failures += ok ? 0 : 1;
  };

  IngestConfig icfg;
  CorpusDB db = ingest_corpus(corpus_dir, icfg);
  std::size_t sgf_files = 0;
  for (const auto& e : fs::recursive_directory_iterator(corpus_dir))
    sgf_files += e.is_regular_file() && ingest_detail::has_ext(e.path(), ".sgf");
  report(db.games.size() + db.stats.games_invalid + db.stats.games_filtered + db.stats.games_duplicate == sgf_files,
         "ingest count", std::to_string(db.games.size()) + " games from " + std::to_string(sgf_files) + " files");

  std::size_t replay_bad = 0;
  for (const auto& g : db.games) {
    std::vector<std::pair<Color, Point>> setup;
    for (const auto& s : g.setup_stones) setup.push_back({s.color, s.point});
    auto slow = oracle::slow_replay(setup, g.moves);
    Board b = initial_board(g);
    for (const auto& m : g.moves) b.try_play(m);
    replay_bad += slow.first_bad.has_value() || slow.board.count('B') != b.count(Stone::Black) ||
                  slow.board.count('W') != b.count(Stone::White) || b.zobrist() != b.recompute_zobrist();
  }
  report(replay_bad == 0, "replay vs flood-fill oracle", std::to_string(replay_bad) + " mismatches");

  auto build = build_prefix_index(db.games);
  std::vector<oracle::SeqGame> seqs;
  for (const auto& g : db.games) seqs.push_back({g.moves});
  auto expect = oracle::pairwise_novelty(seqs, 60);
  std::size_t nov_bad = 0, arith_bad = 0;
  for (std::size_t i = 0; i < db.games.size(); ++i) {
    nov_bad += build.records[i].novel_move_number != expect[i];
    const auto& r = build.records[i];
    arith_bad += r.novel_move_number.has_value() != r.novelty_index.has_value() ||
                 (r.novel_move_number && *r.novelty_index != 60 - *r.novel_move_number);
  }
  report(nov_bad == 0, "novelty vs pairwise oracle", std::to_string(nov_bad) + " mismatches");
  report(arith_bad == 0 && build.records.front().novel_move_number == 1, "novelty arithmetic", "");

  const std::size_t n_eval = std::min<std::size_t>(db.games.size(), static_cast<std::size_t>(std::max(1, n_eval_games)));
  // Evenly spaced sample so both sides of the cutoff are represented.
  std::vector<GameRecord> sample;
  for (std::size_t i = 0; i < n_eval; ++i) sample.push_back(db.games[i * db.games.size() / n_eval]);
  EvalCache cache;
  auto evals = evaluate_games(sample, EngineOptions{}, cache, EvalConfig{},
                              std::max(1u, std::thread::hardware_concurrency()));
  std::size_t dqi_bad = 0;
  for (const auto& d : evals) dqi_bad += d.dqi > 100.0 || (d.matched_ai && d.dqi != 100.0);
  report(dqi_bad == 0, "DQI cap and matched => 100", std::to_string(evals.size()) + " decisions");

  auto obs = join_observations(evals, build.records);
  const auto all = apply_filter(obs, FilterSpec::parse("all"));
  const auto m = apply_filter(obs, FilterSpec::parse("matches-ai"));
  const auto d = apply_filter(obs, FilterSpec::parse("differs-from-ai"));
  std::size_t buckets = 0;
  for (int k = 1; k <= 6; ++k) buckets += apply_filter(obs, FilterSpec::parse("stage-bucket", k)).size();
  report(m.size() + d.size() == all.size() && buckets == all.size(), "filter partitions",
         std::to_string(m.size()) + " matched + " + std::to_string(d.size()) + " differing");

  // Absorbed vs explicit-dummy regression on the evaluated decisions.
  for (auto& o : obs) o.after_ai = o.date->ordinal() >= Date{2016, 3, 15}.ordinal();
  bool hdfe_ok = true;
  std::string hdfe_detail;
  try {
    auto t1 = stats::table1_model(obs, 1);
    std::vector<double> y, a, n, x;
    std::vector<int> move, player, cl;
    std::map<std::string, int> pid;
    for (const auto& o : obs) {
      y.push_back(o.dqi);
      a.push_back(*o.after_ai);
      n.push_back(o.novelty_dummy);
      x.push_back(*o.after_ai * o.novelty_dummy);
      move.push_back(o.move_number);
      player.push_back(pid.try_emplace(o.player_id, static_cast<int>(pid.size())).first->second);
    }
    auto ref = oracle::explicit_dummy_ols(y, {a, n, x}, {move, player}, player);
    for (Eigen::Index j = 0; j < 3; ++j) {
      const double rb = std::abs(t1.fit.coef(j) - ref.coef(j)) / std::max(1.0, std::abs(ref.coef(j)));
      const double rs = std::abs(t1.fit.se(j) - ref.se(j)) / std::max(1e-12, std::abs(ref.se(j)));
      hdfe_ok = hdfe_ok && rb < 1e-8 && rs < 1e-8;
    }
    hdfe_detail = std::to_string(obs.size()) + " rows";
  } catch (const std::exception& e) {
    hdfe_ok = false;
    hdfe_detail = e.what();
  }
  report(hdfe_ok, "absorbed FE vs explicit dummies", hdfe_detail);

  std::cout << (failures ? "verify: FAILED (" + std::to_string(failures) + ")" : std::string("verify: all checks passed"))
            << "\n";
  return failures ? 1 : 0;
}

}  // namespace
