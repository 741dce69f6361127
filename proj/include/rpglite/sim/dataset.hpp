#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpglite/sim/bot.hpp"
#include "rpglite/sim/players.hpp"
#include "rpglite/sim/record.hpp"

namespace rpglite::sim {

inline constexpr const char* kDatasetSchema = "rpglite-dataset/1";

// One logged request. The service writes the same shape.
struct InteractionEvent {
  std::int64_t at_ms = 0;
  std::string username;  // empty for anonymous requests
  std::string endpoint;  // "POST /v1/register"
  std::string params_digest;
  int result = 200;
  std::string outcome;

  bool operator==(const InteractionEvent&) const = default;
};

nlohmann::json to_json(const InteractionEvent& e);
InteractionEvent interaction_from_json(const nlohmann::json& j);

struct Dataset {
  std::vector<Config> configs;  // every config a game refers to
  std::vector<PlayerRecord> players;
  std::vector<GameRecord> games;  // chronological
  std::vector<InteractionEvent> interactions;  // chronological
  nlohmann::json parameters = nlohmann::json::object();  // generator echo, kept in the manifest

  const Config& config_for(const GameRecord& game) const;  // Error(MissingArtifact) if absent
};

// Writes manifest.json, configs.json, players.ndjson, games.ndjson and
// interactions.ndjson into `dir`.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);
// Validates every line; throws Error(SchemaViolation) naming file and line.
Dataset read_dataset(const std::filesystem::path& dir);

// `players` bots sharing one spec, each playing `games` games.
struct PopulationEntry {
  BotSpec spec;
  int players = 1;
  int games = 10;
};
// "SPEC*PLAYERS*GAMES", e.g. "epsilon:0.5~0*10*20".
PopulationEntry parse_population_entry(const std::string& text);

struct ScheduleEntry {
  Config config;
  std::int64_t from_ms = 0;
};

inline BotSpec uniform_house() {
  BotSpec s;
  s.kind = BotKind::UniformRandom;
  return s;
}

struct DatasetOptions {
  std::uint64_t seed = 1;
  std::int64_t epoch_ms = 1'554'076'800'000;  // 2019-04-01T00:00:00Z
  double arrival_mean_hours = 6.0;
  double game_gap_mean_hours = 12.0;
  BotSpec house = uniform_house();
  int move_cap = 1000;
  MedalRules medals;
  unsigned jobs = 1;
  bool solve_missing = false;
};

// Every population player plays all of its games against a shared house bot
// ("house"), which is not a player of the dataset and keeps a fixed 1000
// rating. Arrival and inter-game times are seeded exponential draws; the
// schedule entry in force at a game's start picks its config. Deterministic
// in (population, schedule, options) for any `jobs`.
Dataset generate_dataset(const std::vector<PopulationEntry>& population, std::vector<ScheduleEntry> schedule,
                         const DatasetOptions& options, solver::ArtifactStore* store);

}  // namespace rpglite::sim
