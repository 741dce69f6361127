#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "rpglite/core/config.hpp"
#include "rpglite/sim/players.hpp"

namespace rpglite::service {

inline constexpr int kSlotCount = 5;
inline constexpr const char* kLogSchema = "rpglite-service-log/1";
inline constexpr const char* kSnapshotSchema = "rpglite-service-snapshot/1";

// Transport-neutral request: the HTTP layer fills this in.
struct Request {
  std::string method;  // "GET", "POST", ...
  std::string path;    // "/v1/games/g000001/moves"
  std::map<std::string, std::string> query;
  std::string body;
  std::string token;        // bearer token, empty if absent
  std::string admin_token;  // X-Admin-Token header
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

struct ServiceOptions {
  std::filesystem::path data_dir;          // events.ndjson, snapshot.json, interactions.ndjson
  std::filesystem::path artifact_dir;      // solver artifacts for bots and hints; empty = data_dir/artifacts
  Config config;                           // active season on first start; the log wins afterwards
  std::optional<std::uint64_t> seed;       // fixed-seed mode; unset = OS entropy
  sim::MedalRules medals;
  int pbkdf2_iterations = 100'000;
  std::size_t snapshot_every = 1000;       // events between snapshots; 0 = never
  std::string admin_token;                 // empty disables admin endpoints
  std::function<std::int64_t()> clock;     // ms since epoch; defaults to the system clock
};

// The authoritative game server. All state changes are domain events appended
// to events.ndjson and applied through one code path, so restarting from the
// log (and the latest snapshot) rebuilds the same state. Requests are
// serialized; every /v1 request produces exactly one interaction event.
class GameService {
 public:
  explicit GameService(ServiceOptions options);
  ~GameService();
  GameService(const GameService&) = delete;
  GameService& operator=(const GameService&) = delete;

  Response handle(const Request& request);

  // Canonical dump of the in-memory state (accounts, games, queue, RNG, ...).
  nlohmann::json state_json() const;
  void write_snapshot();
  std::uint64_t event_count() const;
  std::uint64_t log_failures() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rpglite::service
