#pragma once

#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gocf/engine/protocol.hpp"
#include "gocf/engine/transport.hpp"

namespace gocf {

class EngineError : public std::runtime_error {
 public:
  EngineError(const std::string& what, std::string query_id = {}, std::string raw = {})
      : std::runtime_error(what), query_id_(std::move(query_id)), raw_(std::move(raw)) {}
  const std::string& query_id() const noexcept { return query_id_; }
  const std::string& raw_line() const noexcept { return raw_; }

 private:
  std::string query_id_;
  std::string raw_;
};

struct EngineOptions {
  std::string command = "mock";  // "mock" selects the in-process mock
  std::string engine_id;         // defaults to the mock id or the command
  std::chrono::milliseconds timeout{std::chrono::seconds(300)};
  int max_in_flight = 16;
  // The engine reports winrates from Black's side instead of the mover's.
  bool black_perspective = false;
  // Test hook: terminate the process abruptly once this many requests have
  // been sent, as if killed.
  std::optional<std::size_t> die_after_requests;
};

// Pipelines analysis requests over a Transport, matching responses to
// requests by id. Arrival order does not matter.
class EngineClient {
 public:
  EngineClient(std::unique_ptr<Transport> transport, EngineOptions opt)
      : transport_(std::move(transport)), opt_(std::move(opt)) {
    if (opt_.engine_id.empty()) opt_.engine_id = opt_.command == "mock" ? kMockEngineId : opt_.command;
    if (opt_.max_in_flight < 1) opt_.max_in_flight = 1;
  }

  static EngineClient open(EngineOptions opt) {
    std::unique_ptr<Transport> t;
    if (opt.command == "mock") t = std::make_unique<InProcessMockTransport>();
    else t = std::make_unique<ChildProcessTransport>(opt.command);
    return EngineClient(std::move(t), std::move(opt));
  }

  const std::string& id() const noexcept { return opt_.engine_id; }
  std::size_t requests_sent() const noexcept { return requests_sent_; }

  // Queries must already be replay-checked.
  std::vector<Evaluation> analyze(std::span<const PositionQuery> queries) {
    std::vector<Evaluation> results(queries.size());
    std::vector<std::string> ids(queries.size());
    std::vector<std::string> lines(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
      ids[i] = "q" + std::to_string(next_id_++);
      lines[i] = wire::encode_request(ids[i], queries[i]).dump();
    }
    std::map<std::string, std::size_t> outstanding;
    std::size_t next = 0;
    std::size_t done = 0;
    bool restarted = false;

    auto send = [&](std::size_t i) {
      if (opt_.die_after_requests && requests_sent_ >= *opt_.die_after_requests) std::_Exit(137);
      transport_->send_line(lines[i]);
      ++requests_sent_;
    };

    while (done < queries.size()) {
      try {
        while (next < queries.size() && outstanding.size() < static_cast<std::size_t>(opt_.max_in_flight)) {
          outstanding.emplace(ids[next], next);
          send(next);
          ++next;
        }
        auto line = transport_->receive_line(opt_.timeout);
        if (!line) {
          throw EngineError("engine timed out after " + std::to_string(opt_.timeout.count()) + " ms on query " +
                                outstanding.begin()->first,
                            outstanding.begin()->first);
        }
        json j;
        try {
          j = json::parse(*line);
        } catch (const std::exception&) {
          throw EngineError("malformed engine response", {}, *line);
        }
        if (!j.is_object() || !j.contains("id")) {
          spdlog::debug("engine: ignoring line without id: {}", *line);
          continue;
        }
        std::string rid = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
        auto it = outstanding.find(rid);
        if (it == outstanding.end()) {
          if (j.contains("error")) throw EngineError("engine error: " + j.at("error").dump(), rid, *line);
          continue;
        }
        if (j.contains("error"))
          throw EngineError("engine error on query " + rid + ": " + j.at("error").dump(), rid, *line);
        if (!j.contains("moveInfos")) continue;  // partial/progress report
        const std::size_t i = it->second;
        try {
          results[i] = wire::decode_response(j, *line, opt_.engine_id, queries[i].to_move, opt_.black_perspective);
        } catch (const ProtocolError& pe) {
          throw EngineError(std::string(pe.what()) + " (query " + rid + ")", rid, pe.raw_line());
        }
        outstanding.erase(it);
        ++done;
      } catch (const TransportError& te) {
        if (restarted) throw EngineError(std::string("engine failed again after restart: ") + te.what());
        spdlog::warn("engine failure ({}); restarting once", te.what());
        restarted = true;
        try {
          transport_->restart();
          for (const auto& [rid, i] : outstanding) send(i);
        } catch (const TransportError& again) {
          throw EngineError(std::string("engine restart failed: ") + again.what());
        }
      }
    }
    return results;
  }

 private:
  std::unique_ptr<Transport> transport_;
  EngineOptions opt_;
  std::uint64_t next_id_ = 0;
  std::size_t requests_sent_ = 0;
};

}  // namespace gocf
