#pragma once

#include <spdlog/spdlog.h>
#include <zlib.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>

#include "gocf/core/digest.hpp"
#include "gocf/engine/protocol.hpp"

namespace gocf {

// Cache key. `forced` is the single move an allowMoves query was restricted
// to, or kNoForced for a free analysis.
struct CacheKey {
  static constexpr std::uint16_t kNoForced = 0xFFFF;

  std::uint64_t zobrist = 0;
  Color to_move = Color::Black;
  Ruleset rules = Ruleset::Japanese;
  std::uint16_t forced = kNoForced;
  std::int32_t komi_quarters = 0;
  std::uint32_t visits = 0;
  std::string engine_id;

  auto tie() const {
    return std::tie(zobrist, to_move, rules, forced, komi_quarters, visits, engine_id);
  }
  friend bool operator<(const CacheKey& a, const CacheKey& b) { return a.tie() < b.tie(); }
  friend bool operator==(const CacheKey& a, const CacheKey& b) { return a.tie() == b.tie(); }
};

// Append-only evaluation log. Record layout, all integers little-endian:
//
//   offset size field
//   0      4    magic "GCE1"
//   4      4    payload length P
//   8      8    zobrist hash
//   16     1    side to move (0 black, 1 white)
//   17     1    ruleset (0 japanese, 1 chinese)
//   18     2    forced move point index, 0xFFFF if none
//   20     4    komi in quarter points (signed)
//   24     4    visits
//   28     2    engine id length E
//   30     2    reserved, zero
//   32     E    engine id bytes
//   32+E   P    JSON payload {"best":..,"moveInfos":[[move,winrate,visits],..],"visits":..}
//   32+E+P 4    CRC-32 (zlib polynomial) of bytes [0, 32+E+P)
//
// A torn or corrupt tail (from a killed writer) is dropped on open.
class EvalCache {
 public:
  static constexpr std::uint32_t kMagic = 0x31454347;  // "GCE1"
  static constexpr std::size_t kHeaderSize = 32;

  EvalCache() = default;  // memory-only
  explicit EvalCache(std::filesystem::path path) : path_(std::move(path)) { open(); }
  ~EvalCache() {
    if (file_) std::fclose(file_);
  }
  EvalCache(const EvalCache&) = delete;
  EvalCache& operator=(const EvalCache&) = delete;

  std::optional<Evaluation> lookup(const CacheKey& k) const {
    std::shared_lock lock(mu_);
    auto it = entries_.find(k);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void store(const CacheKey& k, const Evaluation& e) {
    std::unique_lock lock(mu_);
    if (entries_.count(k)) return;
    if (file_) {
      std::string rec = encode(k, e);
      if (std::fwrite(rec.data(), 1, rec.size(), file_) != rec.size() || std::fflush(file_) != 0)
        throw std::runtime_error("eval cache: write failed for " + path_.string());
    }
    entries_.emplace(k, e);
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
  }
  std::size_t dropped_tail_bytes() const noexcept { return dropped_; }

  static std::string encode(const CacheKey& k, const Evaluation& e) {
    json infos = json::array();
    for (const auto& m : e.move_infos) infos.push_back({wire::move_text(m.move), m.winrate, m.visits});
    const std::string payload =
        json{{"best", wire::move_text(e.best_move)}, {"moveInfos", std::move(infos)}, {"visits", e.visits_used}}.dump();
    std::string rec;
    rec.reserve(kHeaderSize + k.engine_id.size() + payload.size() + 4);
    put32(rec, kMagic);
    put32(rec, static_cast<std::uint32_t>(payload.size()));
    put64(rec, k.zobrist);
    rec.push_back(static_cast<char>(k.to_move));
    rec.push_back(static_cast<char>(k.rules));
    put16(rec, k.forced);
    put32(rec, static_cast<std::uint32_t>(k.komi_quarters));
    put32(rec, k.visits);
    put16(rec, static_cast<std::uint16_t>(k.engine_id.size()));
    put16(rec, 0);
    rec += k.engine_id;
    rec += payload;
    put32(rec, static_cast<std::uint32_t>(
                   ::crc32(0L, reinterpret_cast<const Bytef*>(rec.data()), static_cast<uInt>(rec.size()))));
    return rec;
  }

  // Decodes the record at `off`; nullopt if truncated or corrupt.
  static std::optional<std::pair<CacheKey, Evaluation>> decode(std::string_view buf, std::size_t off,
                                                               std::size_t* next) {
    if (off + kHeaderSize > buf.size()) return std::nullopt;
    if (get32(buf, off) != kMagic) return std::nullopt;
    const std::uint32_t plen = get32(buf, off + 4);
    const std::uint16_t elen = get16(buf, off + 28);
    const std::size_t body = off + kHeaderSize + elen + plen;
    if (body + 4 > buf.size()) return std::nullopt;
    const auto crc = ::crc32(0L, reinterpret_cast<const Bytef*>(buf.data() + off), static_cast<uInt>(body - off));
    if (crc != get32(buf, body)) return std::nullopt;
    CacheKey k;
    k.zobrist = get64(buf, off + 8);
    k.to_move = static_cast<Color>(buf[off + 16]);
    k.rules = static_cast<Ruleset>(buf[off + 17]);
    k.forced = get16(buf, off + 18);
    k.komi_quarters = static_cast<std::int32_t>(get32(buf, off + 20));
    k.visits = get32(buf, off + 24);
    k.engine_id.assign(buf.substr(off + kHeaderSize, elen));
    Evaluation e;
    try {
      auto j = json::parse(buf.substr(off + kHeaderSize + elen, plen));
      e.best_move = wire::parse_move(j.at("best").get<std::string>());
      for (const auto& m : j.at("moveInfos"))
        e.move_infos.push_back({wire::parse_move(m.at(0).get<std::string>()), m.at(1).get<double>(), m.at(2).get<int>()});
      e.visits_used = j.at("visits").get<int>();
      e.engine_id = k.engine_id;
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (next) *next = body + 4;
    return std::make_pair(std::move(k), std::move(e));
  }

 private:
  void open() {
    std::size_t good = 0;
    if (std::filesystem::exists(path_)) {
      const std::string buf = read_file(path_);
      std::size_t off = 0, next = 0;
      while (auto rec = decode(buf, off, &next)) {
        entries_.insert_or_assign(std::move(rec->first), std::move(rec->second));
        off = next;
      }
      good = off;
      if (good < buf.size()) {
        dropped_ = buf.size() - good;
        spdlog::warn("eval cache {}: dropping {} bytes of torn tail", path_.string(), dropped_);
        std::filesystem::resize_file(path_, good);
      }
    } else if (path_.has_parent_path()) {
      std::filesystem::create_directories(path_.parent_path());
    }
    file_ = std::fopen(path_.c_str(), "ab");
    if (!file_) throw std::runtime_error("eval cache: cannot open " + path_.string());
  }

  static void put16(std::string& s, std::uint16_t v) {
    for (int i = 0; i < 2; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  static void put32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  static void put64(std::string& s, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  static std::uint64_t getn(std::string_view b, std::size_t off, int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[off + i])) << (8 * i);
    return v;
  }
  static std::uint16_t get16(std::string_view b, std::size_t off) { return static_cast<std::uint16_t>(getn(b, off, 2)); }
  static std::uint32_t get32(std::string_view b, std::size_t off) { return static_cast<std::uint32_t>(getn(b, off, 4)); }
  static std::uint64_t get64(std::string_view b, std::size_t off) { return getn(b, off, 8); }

  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  mutable std::shared_mutex mu_;
  std::map<CacheKey, Evaluation> entries_;
  std::size_t dropped_ = 0;
};

}  // namespace gocf
