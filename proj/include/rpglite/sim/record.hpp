#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpglite/core/rules.hpp"

namespace rpglite::sim {

struct MoveRecord {
  Side side = 0;
  Move move;
  std::optional<CharacterId> actor;  // attacks only
  Events events;
  GameState after;
  std::int64_t at_ms = 0;
};

enum class EndReason { Win, Forfeit, Cap, Open };

std::string to_string(EndReason reason);
EndReason parse_end_reason(const std::string& text);

// A game with its full move log. Outcomes (rolls, heals, stuns) are recorded,
// so the rules engine can re-derive every snapshot without a generator.
struct GameRecord {
  std::string game_id;
  std::array<std::string, 2> usernames;
  std::string season_id;
  std::string config_hash;
  std::array<Pair, 2> pairs{};
  Side first_mover = 0;
  std::vector<MoveRecord> moves;
  std::optional<Side> winner;
  EndReason end_reason = EndReason::Open;
  std::int64_t started_at_ms = 0;
  std::int64_t ended_at_ms = 0;

  bool completed() const { return end_reason == EndReason::Win || end_reason == EndReason::Forfeit; }
};

nlohmann::json to_json(const GameRecord& record);
// Throws Error(SchemaViolation) on missing or mistyped fields.
GameRecord game_record_from_json(const nlohmann::json& j);

// Replays the log against the rules and returns the state before each move
// (plus the final state at the back). Throws Error(ReplayMismatch) on the
// first move that is illegal, whose recorded outcome is not a branch of the
// move's distribution, or whose snapshot differs; also checks winner and end
// reason.
std::vector<GameState> replay(const GameRecord& record, const Config& config);

}  // namespace rpglite::sim
