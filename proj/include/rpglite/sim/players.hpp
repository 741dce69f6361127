#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpglite/sim/record.hpp"

namespace rpglite::sim {

inline constexpr int kInitialSkill = 1000;
inline constexpr int kEloK = 32;

// Elo with K = 32; the rounded delta is applied zero-sum, then ratings are
// floored at 0.
std::pair<int, int> elo_update(int winner, int loser);

struct MedalRules {
  int wins_for_first = 1;
  int wins_for_ten = 10;
  int games_for_hundred = 100;

  static MedalRules defaults() { return {}; }
  static MedalRules from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct CharacterCounts {
  int played = 0;
  int won = 0;
};

struct PlayerRecord {
  std::string username;
  std::int64_t created_at_ms = 0;
  int skill = kInitialSkill;
  std::array<CharacterCounts, kCharacterCount> characters{};
  int games = 0;
  int wins = 0;
  std::set<std::string> medals;
  std::vector<std::string> losses_to;
  nlohmann::json extra = nlohmann::json::object();  // e.g. bot spec
};

nlohmann::json to_json(const PlayerRecord& p);
PlayerRecord player_record_from_json(const nlohmann::json& j);

// Bookkeeping for one decided game from `side`'s point of view: counts,
// losses_to and medals. Skill is handled by the caller.
void record_result(PlayerRecord& player, const GameRecord& game, Side side, const GameState& final_state,
                   const Config& config, const MedalRules& rules);

}  // namespace rpglite::sim
