#pragma once

#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gocf/core/csv.hpp"
#include "gocf/core/digest.hpp"
#include "gocf/corpus/ingest.hpp"
#include "gocf/engine/evaluate.hpp"
#include "gocf/engine/selfplay.hpp"
#include "gocf/novelty/novelty.hpp"
#include "gocf/pipeline/analyses.hpp"
#include "gocf/pipeline/filter.hpp"
#include "gocf/pipeline/report_svg.hpp"
#include "gocf/stats/table1.hpp"

namespace gocf {

inline constexpr const char* kToolVersion = "gocf 0.1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Declarative run configuration. Relative paths resolve against the
// directory of the config file.
struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path out;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  IngestConfig ingest;
  NoveltyOptions novelty;

  EngineOptions engine;
  unsigned engine_workers = 0;  // 0: all cores for the mock, 1 otherwise
  EvalConfig eval;
  std::filesystem::path eval_cache;  // empty: <out>/cache/evaluate.cache

  int selfplay_games = 0;  // 0 disables self-play and injection
  SelfplayConfig selfplay;
  Date inject_date{2016, 3, 14};
  std::filesystem::path selfplay_cache;

  Date cutoff{2016, 3, 15};
  std::optional<int> baseline_year;
  std::optional<int> baseline_month;  // "YYYY-MM"
  int relaxed_prefix = 0;
  bool novelty_both_players = false;
  bool report = true;

  static RunConfig from_json(const json& j, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& file);
  json to_json() const;
  std::string hash() const { return sha256_hex(to_json().dump()); }

  unsigned workers() const {
    if (engine_workers) return engine_workers;
    if (engine.command != "mock") return 1;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

namespace run_detail {

inline void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == k;
    if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + k + "'");
  }
}

inline std::optional<Date> opt_date(const json& j, const char* key, std::string_view where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto s = j.at(key).get<std::string>();
  if (s.empty()) return std::nullopt;
  try {
    return Date::parse_iso(s);
  } catch (const std::invalid_argument&) {
    throw ConfigError(std::string(where) + "." + key + ": expected YYYY-MM-DD, got '" + s + "'");
  }
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

inline std::string date_or_empty(const std::optional<Date>& d) { return d ? d->to_string() : ""; }

}  // namespace run_detail

inline RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base) {
  using namespace run_detail;
  check_keys(j, "config", {"corpus", "out", "seed", "threads", "ingest", "novelty", "engine", "evaluate", "selfplay",
                           "regress", "report"});
  RunConfig c;
  try {
    c.corpus = resolve(base, j.at("corpus").get<std::string>());
    c.out = resolve(base, j.at("out").get<std::string>());
    c.seed = j.value("seed", std::uint64_t{1});
    c.threads = j.value("threads", 0u);
    if (j.contains("ingest")) {
      const json& s = j.at("ingest");
      check_keys(s, "ingest", {"dedup", "include_handicap", "date_min", "date_max"});
      c.ingest.dedup = s.value("dedup", true);
      c.ingest.include_handicap = s.value("include_handicap", false);
      c.ingest.date_min = opt_date(s, "date_min", "ingest");
      c.ingest.date_max = opt_date(s, "date_max", "ingest");
    }
    c.ingest.threads = c.threads;
    if (j.contains("novelty")) {
      const json& s = j.at("novelty");
      check_keys(s, "novelty", {"max_move", "canonicalize"});
      c.novelty.max_move = s.value("max_move", 60);
      c.novelty.canonicalize = s.value("canonicalize", false);
    }
    if (j.contains("engine")) {
      const json& s = j.at("engine");
      check_keys(s, "engine", {"command", "visits", "komi", "rules", "max_in_flight", "timeout_s", "workers",
                               "black_perspective", "engine_id"});
      c.engine.command = s.value("command", std::string("mock"));
      c.engine.engine_id = s.value("engine_id", std::string());
      c.eval.visits = s.value("visits", 50);
      c.eval.komi = Komi::from_points(s.value("komi", 6.5));
      c.eval.rules = parse_ruleset(s.value("rules", std::string("japanese")));
      c.engine.max_in_flight = s.value("max_in_flight", 16);
      c.engine.timeout = std::chrono::milliseconds(static_cast<long long>(s.value("timeout_s", 300.0) * 1000));
      c.engine_workers = s.value("workers", 0u);
      c.engine.black_perspective = s.value("black_perspective", false);
    }
    if (j.contains("evaluate")) {
      const json& s = j.at("evaluate");
      check_keys(s, "evaluate", {"max_move", "cache"});
      c.eval.max_move = s.value("max_move", 60);
      c.eval_cache = resolve(base, s.value("cache", std::string()));
    }
    if (j.contains("selfplay")) {
      const json& s = j.at("selfplay");
      check_keys(s, "selfplay", {"games", "max_move", "top_k", "temperature", "inject_date", "cache"});
      c.selfplay_games = s.value("games", 0);
      c.selfplay.max_move = s.value("max_move", 60);
      c.selfplay.top_k = s.value("top_k", 5);
      c.selfplay.temperature = s.value("temperature", 0.02);
      if (auto d = opt_date(s, "inject_date", "selfplay")) c.inject_date = *d;
      c.selfplay_cache = resolve(base, s.value("cache", std::string()));
    }
    if (j.contains("regress")) {
      const json& s = j.at("regress");
      check_keys(s, "regress", {"cutoff", "baseline_year", "baseline_month", "relaxed_prefix", "novelty_both_players"});
      if (auto d = opt_date(s, "cutoff", "regress")) c.cutoff = *d;
      if (s.contains("baseline_year") && !s.at("baseline_year").is_null()) c.baseline_year = s.at("baseline_year").get<int>();
      if (s.contains("baseline_month") && !s.at("baseline_month").is_null())
        c.baseline_month = stats::parse_period_label(s.at("baseline_month").get<std::string>(), stats::PeriodKind::Month);
      c.relaxed_prefix = s.value("relaxed_prefix", 0);
      c.novelty_both_players = s.value("novelty_both_players", false);
    }
    if (j.contains("report")) {
      const json& s = j.at("report");
      check_keys(s, "report", {"enabled"});
      c.report = s.value("enabled", true);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.selfplay.visits = c.eval.visits;
  c.selfplay.komi = c.eval.komi;
  c.selfplay.rules = c.eval.rules;
  if (c.corpus.empty()) throw ConfigError("config: 'corpus' is required");
  if (c.out.empty()) throw ConfigError("config: 'out' is required");
  if (c.novelty.max_move < 1 || c.eval.max_move < 1) throw ConfigError("config: max_move must be positive");
  if (c.eval.visits < 1) throw ConfigError("config: engine.visits must be positive");
  if (c.selfplay_games < 0) throw ConfigError("config: selfplay.games must be >= 0");
  if (c.selfplay_games > 0 && c.inject_date.ordinal() >= c.cutoff.ordinal())
    throw ConfigError("config: selfplay.inject_date must precede regress.cutoff");
  if (c.relaxed_prefix < 0) throw ConfigError("config: regress.relaxed_prefix must be >= 0");
  return c;
}

inline RunConfig RunConfig::load(const std::filesystem::path& file) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::exception& e) {
    throw ConfigError("config " + file.string() + ": " + e.what());
  }
  return from_json(j, std::filesystem::absolute(file).parent_path());
}

inline json RunConfig::to_json() const {
  using run_detail::date_or_empty;
  return {{"corpus", corpus.string()},
          {"out", out.string()},
          {"seed", seed},
          {"ingest", ingest.to_json()},
          {"novelty", {{"max_move", novelty.max_move}, {"canonicalize", novelty.canonicalize}}},
          {"engine",
           {{"command", engine.command},
            {"engine_id", engine.engine_id},
            {"visits", eval.visits},
            {"komi", eval.komi.points()},
            {"rules", to_string(eval.rules)},
            {"black_perspective", engine.black_perspective}}},
          {"evaluate", {{"max_move", eval.max_move}}},
          {"selfplay",
           {{"games", selfplay_games},
            {"max_move", selfplay.max_move},
            {"top_k", selfplay.top_k},
            {"temperature", selfplay.temperature},
            {"inject_date", inject_date.to_string()}}},
          {"regress",
           {{"cutoff", cutoff.to_string()},
            {"baseline_year", baseline_year ? json(*baseline_year) : json()},
            {"baseline_month", baseline_month ? json(stats::period_label(*baseline_month, stats::PeriodKind::Month)) : json()},
            {"relaxed_prefix", relaxed_prefix},
            {"novelty_both_players", novelty_both_players}}},
          {"report", {{"enabled", report}}}};
}

// Digest over every .sgf/.zip file under `root`: relative path and content,
// in path order.
inline std::string corpus_digest(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw IngestError("corpus root is not a directory: " + root.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied))
    if (e.is_regular_file() && (ingest_detail::has_ext(e.path(), ".sgf") || ingest_detail::has_ext(e.path(), ".zip"))) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  Sha256 h;
  for (const auto& f : files) {
    h.update(fs::relative(f, root).generic_string());
    h.update(std::string_view("\0", 1));
    h.update(sha256_file(f));
  }
  return h.hex();
}

inline std::size_t count_lines(const std::filesystem::path& p) {
  const std::string text = read_file(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

struct StageOutputs {
  std::map<std::string, std::size_t> rows;  // relative path -> data rows
  std::vector<std::string> metadata;         // written but not digested (timestamps)
  std::vector<std::string> warnings;
};

struct StageResult {
  std::string name;
  std::string hash;
  std::string status;  // ok, skipped, failed, not-run
  bool stale = false;
  std::string error;
  double seconds = 0.0;
  std::int64_t ran_at = 0;
  std::map<std::string, std::pair<std::string, std::size_t>> outputs;  // path -> (sha256, rows)
  std::vector<std::string> metadata;
  std::vector<std::string> warnings;
};

struct RunSummary {
  bool ok = true;
  std::vector<StageResult> stages;  // execution order
  std::filesystem::path manifest;

  const StageResult* stage(std::string_view name) const {
    for (const auto& s : stages)
      if (s.name == name) return &s;
    return nullptr;
  }
  std::size_t executed() const {
    return static_cast<std::size_t>(std::count_if(stages.begin(), stages.end(), [](const StageResult& s) { return s.status == "ok"; }));
  }
};

struct RunOptions {
  bool force = false;  // rerun every stage
};

// The staged pipeline. Each stage has a content hash over its settings and
// the digests of its inputs; a stage whose hash matches the previous
// manifest and whose outputs are intact is skipped.
class Pipeline {
 public:
  static constexpr const char* kManifest = "run_manifest.json";

  explicit Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) { define(); }

  RunSummary run(const RunOptions& ro = {}) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg_.out);
    const json previous = load_previous();
    const std::int64_t started = unix_time_now();
    corpus_digest_ = corpus_digest(cfg_.corpus);

    std::map<std::string, StageResult> results;
    std::set<std::string> done, failed;
    std::vector<std::string> order;
    std::mutex mu;

    while (done.size() + failed.size() < stages_.size()) {
      std::vector<const Stage*> wave;
      for (const auto& st : stages_) {
        if (done.contains(st.name) || failed.contains(st.name)) continue;
        bool blocked = false, ready = true;
        for (const auto& d : st.deps) {
          if (failed.contains(d)) blocked = true;
          if (!done.contains(d)) ready = false;
        }
        if (blocked) {
          StageResult r = carry_over(previous, st.name);
          r.status = "not-run";
          r.stale = r.stale || !r.outputs.empty();
          r.error = "upstream stage failed";
          results[st.name] = r;
          failed.insert(st.name);
          order.push_back(st.name);
        } else if (ready) {
          wave.push_back(&st);
        }
      }
      if (wave.empty()) continue;
      std::vector<std::jthread> threads;
      for (const Stage* st : wave) {
        threads.emplace_back([&, st] {
          StageResult r = run_stage(*st, previous, results, mu, ro.force);
          std::lock_guard lock(mu);
          results[st->name] = std::move(r);
        });
      }
      threads.clear();
      for (const Stage* st : wave) {
        order.push_back(st->name);
        (results[st->name].status == "failed" ? failed : done).insert(st->name);
      }
    }

    RunSummary summary;
    for (const auto& n : order) {
      summary.stages.push_back(results[n]);
      if (results[n].status == "failed" || results[n].status == "not-run") summary.ok = false;
    }
    json m = {{"tool_version", kToolVersion},
              {"config_hash", cfg_.hash()},
              {"config", cfg_.to_json()},
              {"inputs", {{"corpus", cfg_.corpus.string()}, {"corpus_digest", corpus_digest_}}},
              {"started_at_unix", started},
              {"finished_at_unix", unix_time_now()},
              {"status", summary.ok ? "ok" : "failed"}};
    json stages = json::object();
    for (const auto& r : summary.stages) {
      json outs = json::object();
      for (const auto& [path, v] : r.outputs) outs[path] = {{"sha256", v.first}, {"rows", v.second}};
      stages[r.name] = {{"hash", r.hash},     {"status", r.status},     {"stale", r.stale},
                        {"ran_at_unix", r.ran_at}, {"seconds", r.seconds}, {"outputs", outs},
                        {"metadata", r.metadata},  {"warnings", r.warnings}};
      if (!r.error.empty()) stages[r.name]["error"] = r.error;
    }
    m["stages"] = stages;
    summary.manifest = cfg_.out / kManifest;
    write_file(summary.manifest, m.dump(2) + "\n");
    return summary;
  }

  const RunConfig& config() const { return cfg_; }

 private:
  struct Stage {
    std::string name;
    std::vector<std::string> deps;
    std::function<json()> settings;  // stage-specific part of the hash
    std::function<StageOutputs()> body;
  };

  json load_previous() const {
    const auto p = cfg_.out / kManifest;
    if (!std::filesystem::exists(p)) return json::object();
    try {
      return json::parse(read_file(p));
    } catch (const std::exception& e) {
      spdlog::warn("ignoring unreadable manifest {}: {}", p.string(), e.what());
      return json::object();
    }
  }

  StageResult carry_over(const json& previous, const std::string& name) const {
    StageResult r;
    r.name = name;
    if (!previous.contains("stages") || !previous["stages"].contains(name)) return r;
    const json& s = previous["stages"][name];
    r.hash = s.value("hash", "");
    r.stale = s.value("stale", false);
    r.ran_at = s.value("ran_at_unix", std::int64_t{0});
    r.seconds = s.value("seconds", 0.0);
    const json outputs = s.value("outputs", json::object());
    for (const auto& [path, v] : outputs.items())
      r.outputs[path] = {v.value("sha256", ""), v.value("rows", std::size_t{0})};
    r.metadata = s.value("metadata", std::vector<std::string>{});
    r.warnings = s.value("warnings", std::vector<std::string>{});
    return r;
  }

  StageResult run_stage(const Stage& st, const json& previous, const std::map<std::string, StageResult>& results,
                        std::mutex& mu, bool force) {
    StageResult r;
    r.name = st.name;
    {
      Sha256 h;
      h.update(kToolVersion).update("\n").update(st.name).update("\n").update(st.settings().dump()).update("\n");
      std::lock_guard lock(mu);
      for (const auto& d : st.deps)
        for (const auto& [path, v] : results.at(d).outputs) h.update(path).update("=").update(v.first).update("\n");
      r.hash = h.hex();
    }
    StageResult prev = carry_over(previous, st.name);
    if (!force && prev.hash == r.hash && !prev.stale && !prev.outputs.empty() && outputs_intact(prev)) {
      prev.status = "skipped";
      spdlog::info("stage {}: up to date", st.name);
      return prev;
    }
    spdlog::info("stage {}: running", st.name);
    const auto t0 = std::chrono::steady_clock::now();
    r.ran_at = unix_time_now();
    try {
      StageOutputs out = st.body();
      for (const auto& [path, rows] : out.rows) r.outputs[path] = {sha256_file(cfg_.out / path), rows};
      r.metadata = out.metadata;
      r.warnings = out.warnings;
      r.status = "ok";
    } catch (const std::exception& e) {
      spdlog::error("stage {} failed: {}", st.name, e.what());
      r.status = "failed";
      r.error = e.what();
      r.stale = true;
      r.outputs = prev.outputs;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }

  bool outputs_intact(const StageResult& r) const {
    for (const auto& [path, v] : r.outputs) {
      const auto p = cfg_.out / path;
      if (!std::filesystem::exists(p) || sha256_file(p) != v.first) return false;
    }
    return true;
  }

  std::filesystem::path path(const std::string& rel) const { return cfg_.out / rel; }

  std::filesystem::path cache_path(const std::filesystem::path& configured, const char* fallback,
                                   const char* env) const {
    if (env)
      if (const char* e = std::getenv(env); e && *e) return e;
    return configured.empty() ? cfg_.out / "cache" / fallback : configured;
  }

  EngineOptions engine_options() const {
    EngineOptions o = cfg_.engine;
    if (const char* e = std::getenv("GO_CF_ENGINE"); e && *e) o.command = e;
    return o;
  }

  json engine_settings() const {
    const EngineOptions o = engine_options();
    return {{"engine", o.engine_id.empty() ? o.command : o.engine_id},
            {"visits", cfg_.eval.visits},
            {"komi", cfg_.eval.komi.points()},
            {"rules", to_string(cfg_.eval.rules)},
            {"black_perspective", o.black_perspective}};
  }

  std::vector<MoveObservation> load_observations(const std::string& rel) const {
    return stats::read_observations(csv::load(path(rel)), cfg_.cutoff);
  }

  void define();

  RunConfig cfg_;
  std::string corpus_digest_;
  std::vector<Stage> stages_;
};

inline void Pipeline::define() {
  const bool inject = cfg_.selfplay_games > 0;

  stages_.push_back({"ingest", {},
                     [this] { return json{{"config", cfg_.ingest.to_json()}, {"corpus_digest", corpus_digest_}}; },
                     [this] {
                       CorpusDB db = ingest_corpus(cfg_.corpus, cfg_.ingest);
                       db.config_hash = cfg_.ingest.hash();
                       db.save(path("corpus"));
                       StageOutputs o;
                       o.rows["corpus/records.jsonl"] = db.games.size();
                       o.rows["corpus/validation.csv"] = db.reports.size();
                       o.metadata.push_back("corpus/manifest.json");
                       if (db.stats.files_unreadable || db.stats.games_invalid)
                         o.warnings.push_back(std::to_string(db.stats.files_unreadable) + " unreadable files, " +
                                              std::to_string(db.stats.games_invalid) + " invalid games");
                       return o;
                     }});

  stages_.push_back({"novelty", {"ingest"},
                     [this] { return json{{"max_move", cfg_.novelty.max_move}, {"canonicalize", cfg_.novelty.canonicalize}}; },
                     [this] {
                       CorpusDB db = CorpusDB::load(path("corpus"));
                       auto built = build_prefix_index(db.games, cfg_.novelty);
                       novelty_csv(built.records).save(path("novelty/novelty.csv"));
                       auto dist = novelty_distribution(built.records, cfg_.novelty.max_move);
                       csv::Writer w({"move_number", "count", "cumulative_share_of_games", "cumulative_share_of_novel"});
                       for (int k = 1; k <= cfg_.novelty.max_move; ++k)
                         w.row({std::to_string(k), std::to_string(dist.count[k]), csv::fmt(dist.cumulative_of_games[k], 8),
                                csv::fmt(dist.cumulative_of_novel[k], 8)});
                       w.save(path("novelty/distribution.csv"));
                       StageOutputs o;
                       o.rows["novelty/novelty.csv"] = built.records.size();
                       o.rows["novelty/distribution.csv"] = static_cast<std::size_t>(cfg_.novelty.max_move);
                       return o;
                     }});

  stages_.push_back({"evaluate", {"ingest"},
                     [this] { return json{{"engine", engine_settings()}, {"max_move", cfg_.eval.max_move}}; },
                     [this] {
                       CorpusDB db = CorpusDB::load(path("corpus"));
                       EvalCache cache(cache_path(cfg_.eval_cache, "evaluate.cache", "GO_CF_CACHE"));
                       auto evals = evaluate_games(db.games, engine_options(), cache, cfg_.eval, cfg_.workers());
                       csv::Writer w(decision_eval_header());
                       append_decision_evals(w, evals);
                       w.save(path("evaluate/evals.csv"));
                       StageOutputs o;
                       o.rows["evaluate/evals.csv"] = evals.size();
                       const auto matched = std::count_if(evals.begin(), evals.end(), [](const DecisionEval& d) { return d.matched_ai; });
                       spdlog::info("evaluate: {} decisions, {} matched the engine", evals.size(), matched);
                       return o;
                     }});

  if (inject) {
    stages_.push_back({"selfplay", {},
                       [this] {
                         return json{{"engine", engine_settings()},
                                     {"games", cfg_.selfplay_games},
                                     {"seed", cfg_.seed},
                                     {"max_move", cfg_.selfplay.max_move},
                                     {"top_k", cfg_.selfplay.top_k},
                                     {"temperature", cfg_.selfplay.temperature}};
                       },
                       [this] {
                         EngineClient client = EngineClient::open(engine_options());
                         EvalCache cache(cache_path(cfg_.selfplay_cache, "selfplay.cache", nullptr));
                         Evaluator ev(client, cache);
                         auto games = selfplay_generate(ev, cfg_.selfplay_games, cfg_.seed, cfg_.selfplay);
                         if (games.empty()) throw std::runtime_error("selfplay produced no games");
                         std::string lines;
                         for (const auto& g : games) lines += to_json(g).dump() + "\n";
                         write_file(path("selfplay/games.jsonl"), lines);
                         StageOutputs o;
                         o.rows["selfplay/games.jsonl"] = games.size();
                         if (games.size() < static_cast<std::size_t>(cfg_.selfplay_games))
                           o.warnings.push_back(std::to_string(cfg_.selfplay_games - games.size()) + " self-play games discarded");
                         return o;
                       }});

    stages_.push_back({"novelty_injected", {"ingest", "selfplay"},
                       [this] {
                         return json{{"max_move", cfg_.novelty.max_move},
                                     {"canonicalize", cfg_.novelty.canonicalize},
                                     {"inject_date", cfg_.inject_date.to_string()}};
                       },
                       [this] {
                         CorpusDB db = CorpusDB::load(path("corpus"));
                         std::vector<GameRecord> synthetic;
                         std::istringstream in(read_file(path("selfplay/games.jsonl")));
                         for (std::string line; std::getline(in, line);)
                           if (!line.empty()) synthetic.push_back(record_from_json(json::parse(line)));
                         auto records = inject_synthetic_games(db.games, synthetic, cfg_.inject_date, cfg_.cutoff,
                                                               cfg_.novelty);
                         novelty_csv(records).save(path("novelty/novelty_injected.csv"));
                         StageOutputs o;
                         o.rows["novelty/novelty_injected.csv"] = records.size();
                         return o;
                       }});
  }

  auto observations = [this](const char* novelty_file, const char* out_file) {
    return [this, novelty_file, out_file] {
      auto evals = read_decision_evals(csv::load(path("evaluate/evals.csv")));
      auto nov = read_novelty_csv(csv::load(path(novelty_file)));
      auto rows = join_observations(evals, nov);
      stats::observations_csv(rows).save(path(out_file));
      StageOutputs o;
      o.rows[out_file] = rows.size();
      return o;
    };
  };
  stages_.push_back({"observations", {"evaluate", "novelty"}, [] { return json::object(); },
                     observations("novelty/novelty.csv", "observations/observations.csv")});
  if (inject)
    stages_.push_back({"observations_injected", {"evaluate", "novelty_injected"}, [] { return json::object(); },
                       observations("novelty/novelty_injected.csv", "observations/observations_injected.csv")});

  std::vector<std::string> regress_deps = {"observations"};
  if (inject) regress_deps.push_back("observations_injected");
  stages_.push_back(
      {"regress", regress_deps,
       [this] { return cfg_.to_json()["regress"]; },
       [this, inject] {
         StageOutputs o;
         const auto obs = load_observations("observations/observations.csv");
         std::vector<MoveObservation> obs_inj;
         if (inject) obs_inj = load_observations("observations/observations_injected.csv");

         for (int model : {1, 2}) {
           const std::string rel = "results/table1_m" + std::to_string(model) + ".csv";
           try {
             auto t = stats::table1_model(obs, model);
             auto w = stats::table1_csv(t);
             w.save(path(rel));
             o.rows[rel] = w.rows();
           } catch (const std::runtime_error& e) {
             csv::Writer w({"term", "estimate", "se", "stars", "ci_low", "ci_high"});
             w.save(path(rel));
             o.rows[rel] = 0;
             o.warnings.push_back("table1 model " + std::to_string(model) + ": " + e.what());
           }
         }
         for (const auto& spec : standard_trends(cfg_.relaxed_prefix, inject)) {
           const auto& source = spec.injected ? obs_inj : obs;
           const auto subset = apply_filter(source, spec.filter);
           const std::optional<int> baseline =
               spec.kind == stats::PeriodKind::Year ? cfg_.baseline_year : cfg_.baseline_month;
           const std::string rel = "results/trend_" + spec.name + ".csv";
           stats::TrendSeries series;
           series.kind = spec.kind;
           try {
             series = trend_for(subset, spec.metric, spec.kind, baseline, cfg_.novelty_both_players);
             if (!series.omitted.empty())
               o.warnings.push_back(spec.name + ": " + std::to_string(series.omitted.size()) +
                                    " periods not identified after absorbing player effects");
           } catch (const std::runtime_error& e) {
             series.points.clear();
             o.warnings.push_back(spec.name + ": " + e.what());
           }
           auto w = stats::trend_csv(series);
           w.save(path(rel));
           o.rows[rel] = w.rows();
         }
         return o;
       }});

  if (cfg_.report)
    stages_.push_back({"report", {"regress"},
                       [this] { return json{{"cutoff", cfg_.cutoff.to_string()}}; },
                       [this] {
                         StageOutputs o;
                         for (const auto& p : render_report(path("results"), path("figures"), cfg_.cutoff)) {
                           const std::string rel = std::filesystem::relative(p, cfg_.out).generic_string();
                           o.rows[rel] = p.extension() == ".txt" ? count_lines(p) : 1;
                         }
                         return o;
                       }});
}

}  // namespace gocf
