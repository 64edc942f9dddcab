#pragma once

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "gocf/core/csv.hpp"
#include "gocf/core/digest.hpp"
#include "gocf/core/zip.hpp"
#include "gocf/corpus/record_json.hpp"
#include "gocf/corpus/sgf.hpp"
#include "gocf/corpus/validate.hpp"

namespace gocf {

struct IngestConfig {
  std::optional<Date> date_min;
  std::optional<Date> date_max;
  bool include_handicap = false;
  bool dedup = true;
  unsigned threads = 0;  // 0 = hardware concurrency

  json to_json() const {
    return {{"date_min", date_min ? date_min->to_string() : ""},
            {"date_max", date_max ? date_max->to_string() : ""},
            {"include_handicap", include_handicap},
            {"dedup", dedup}};
  }
  std::string hash() const { return sha256_hex(to_json().dump()); }
};

struct IngestStats {
  std::size_t files_seen = 0;
  std::size_t files_unreadable = 0;
  std::size_t files_unparseable = 0;
  std::size_t games_parsed = 0;
  std::size_t games_invalid = 0;
  std::size_t games_filtered = 0;
  std::size_t games_duplicate = 0;
  std::size_t games_kept = 0;
};

struct CorpusDB {
  std::vector<GameRecord> games;  // sorted under corpus_less
  std::vector<ValidationReport> reports;
  IngestStats stats;
  std::string config_hash;

  static constexpr const char* kRecordsFile = "records.jsonl";
  static constexpr const char* kReportFile = "validation.csv";
  static constexpr const char* kManifestFile = "manifest.json";

  void save(const std::filesystem::path& dir) const;
  static CorpusDB load(const std::filesystem::path& dir);
};

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace ingest_detail {

struct SourceUnit {
  std::string name;  // relative, '/'-separated
  std::string bytes;
};

struct ParsedUnit {
  std::vector<GameRecord> games;
  std::vector<ValidationReport> reports;
  bool unparseable = false;
};

inline ParsedUnit parse_unit(const SourceUnit& unit, const Date& today) {
  ParsedUnit out;
  std::vector<GameRecord> games;
  try {
    games = parse_sgf(unit.bytes);
  } catch (const SgfParseError& e) {
    out.unparseable = true;
    out.reports.push_back({unit.name, ValidationStatus::Malformed, std::nullopt, e.what()});
    return out;
  }
  for (std::size_t i = 0; i < games.size(); ++i) {
    GameRecord& g = games[i];
    g.game_id = games.size() == 1 ? unit.name : unit.name + "#" + std::to_string(i);
    g.source_path = unit.name;
    out.reports.push_back(validate_record(g, today));
    out.games.push_back(std::move(g));
  }
  return out;
}

inline bool has_ext(const std::filesystem::path& p, std::string_view ext) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

}  // namespace ingest_detail

// Parses every .sgf (and .sgf inside .zip) under root, validates, filters,
// deduplicates and returns the corpus in total order. Output does not
// depend on directory iteration order or thread count.
inline CorpusDB ingest_corpus(const std::filesystem::path& root, const IngestConfig& config,
                              const Date& today = Date::today()) {
  namespace fs = std::filesystem;
  using namespace ingest_detail;
  if (!fs::is_directory(root)) throw IngestError("corpus root is not a directory: " + root.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied)) {
    if (!entry.is_regular_file()) continue;
    if (has_ext(entry.path(), ".sgf") || has_ext(entry.path(), ".zip")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  CorpusDB db;
  db.config_hash = config.hash();
  db.stats.files_seen = files.size();

  std::vector<SourceUnit> units;
  for (const auto& f : files) {
    std::string rel = fs::relative(f, root).generic_string();
    std::string bytes;
    try {
      bytes = read_file(f);
    } catch (const std::exception& e) {
      spdlog::warn("skipping unreadable file {}: {}", rel, e.what());
      ++db.stats.files_unreadable;
      continue;
    }
    if (has_ext(f, ".zip")) {
      try {
        for (auto& entry : read_zip(bytes))
          if (has_ext(entry.name, ".sgf")) units.push_back({rel + "/" + entry.name, std::move(entry.data)});
      } catch (const std::exception& e) {
        spdlog::warn("skipping unreadable archive {}: {}", rel, e.what());
        ++db.stats.files_unreadable;
      }
    } else {
      units.push_back({std::move(rel), std::move(bytes)});
    }
  }

  std::vector<ParsedUnit> parsed(units.size());
  unsigned n_threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, std::max<std::size_t>(1, units.size()));
  {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < units.size(); i = next++) parsed[i] = parse_unit(units[i], today);
      });
  }

  std::vector<GameRecord> kept;
  for (auto& unit : parsed) {
    if (unit.unparseable) ++db.stats.files_unparseable;
    for (std::size_t i = 0; i < unit.games.size(); ++i) {
      ++db.stats.games_parsed;
      ValidationReport& rep = unit.reports[i];
      GameRecord& g = unit.games[i];
      if (rep.status != ValidationStatus::Ok) {
        ++db.stats.games_invalid;
      } else if (!config.include_handicap && !g.setup_stones.empty()) {
        rep.status = ValidationStatus::OutOfScope;
        rep.detail = "setup stones";
        ++db.stats.games_filtered;
      } else if ((config.date_min && g.date.ordinal() < config.date_min->ordinal()) ||
                 (config.date_max && g.date.ordinal() > config.date_max->ordinal())) {
        rep.status = ValidationStatus::OutOfScope;
        rep.detail = "outside date range";
        ++db.stats.games_filtered;
      } else {
        kept.push_back(std::move(g));
      }
    }
    for (auto& r : unit.reports) db.reports.push_back(std::move(r));
  }
  std::sort(db.reports.begin(), db.reports.end(),
            [](const ValidationReport& a, const ValidationReport& b) { return a.game_id < b.game_id; });
  std::sort(kept.begin(), kept.end(), corpus_less);

  if (config.dedup) {
    using Key = std::tuple<std::string, std::string, std::string, std::string>;
    std::map<Key, std::string> seen;
    std::unordered_map<std::string, std::size_t> report_at;
    for (std::size_t i = 0; i < db.reports.size(); ++i) report_at.emplace(db.reports[i].game_id, i);
    std::vector<GameRecord> unique;
    for (auto& g : kept) {
      std::string moves;
      moves.reserve(g.moves.size() * 3);
      for (const auto& m : g.moves) {
        moves.push_back(color_letter(m.color));
        moves += m.point.to_sgf();
      }
      Key k{g.date.to_string(), g.black_id, g.white_id, std::move(moves)};
      auto [it, inserted] = seen.emplace(std::move(k), g.game_id);
      if (!inserted) {
        ++db.stats.games_duplicate;
        ValidationReport& r = db.reports[report_at.at(g.game_id)];
        r.status = ValidationStatus::OutOfScope;
        r.detail = "duplicate of " + it->second;
        continue;
      }
      unique.push_back(std::move(g));
    }
    kept = std::move(unique);
  }

  db.stats.games_kept = kept.size();
  if (kept.empty()) throw IngestError("no valid games found under " + root.string());
  db.games = std::move(kept);
  return db;
}

inline void CorpusDB::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::string records;
  for (const auto& g : games) {
    records += to_json(g).dump();
    records += '\n';
  }
  write_file(dir / kRecordsFile, records);

  csv::Writer rep({"game_id", "status", "first_bad_move", "detail"});
  for (const auto& r : reports)
    rep.row({r.game_id, to_string(r.status), r.first_bad_move ? std::to_string(*r.first_bad_move) : "", r.detail});
  rep.save(dir / kReportFile);

  json manifest = {{"records", games.size()},
                   {"records_sha256", sha256_hex(records)},
                   {"config_hash", config_hash},
                   {"ingested_at_unix", unix_time_now()},
                   {"counts",
                    {{"files_seen", stats.files_seen},
                     {"files_unreadable", stats.files_unreadable},
                     {"files_unparseable", stats.files_unparseable},
                     {"games_parsed", stats.games_parsed},
                     {"games_invalid", stats.games_invalid},
                     {"games_filtered", stats.games_filtered},
                     {"games_duplicate", stats.games_duplicate},
                     {"games_kept", stats.games_kept}}}};
  write_file(dir / kManifestFile, manifest.dump(2) + "\n");
}

inline CorpusDB CorpusDB::load(const std::filesystem::path& dir) {
  CorpusDB db;
  std::ifstream in(dir / kRecordsFile);
  if (!in) throw IngestError("cannot open corpus database " + (dir / kRecordsFile).string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    db.games.push_back(record_from_json(json::parse(line)));
  }
  if (std::filesystem::exists(dir / kManifestFile)) {
    auto m = json::parse(read_file(dir / kManifestFile));
    db.config_hash = m.value("config_hash", "");
  }
  if (!std::is_sorted(db.games.begin(), db.games.end(), corpus_less))
    throw IngestError("corpus database is not in corpus order: " + dir.string());
  db.stats.games_kept = db.games.size();
  return db;
}

}  // namespace gocf
