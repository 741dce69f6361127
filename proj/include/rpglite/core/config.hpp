#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rpglite/core/character.hpp"

namespace rpglite {

struct CharacterStats {
  int health = 1;
  double accuracy = 1.0;
  int damage = 1;

  bool operator==(const CharacterStats&) const = default;
};

// One season of RPGLite: the 29 numeric attributes plus a label.
struct Config {
  std::string season_id;
  std::array<CharacterStats, kCharacterCount> stats{};
  int heal = 1;
  int execute_range = 1;
  int rage_threshold = 1;
  int rage_damage = 2;
  int graze = 0;

  const CharacterStats& of(CharacterId id) const { return stats[index_of(id)]; }
  CharacterStats& of(CharacterId id) { return stats[index_of(id)]; }

  bool operator==(const Config&) const = default;
};

inline constexpr std::size_t kAttributeCount = 29;

// Canonical attribute names in file order ("knight_health", ..., "gunner_graze").
const std::array<std::string, kAttributeCount>& attribute_names();

// Upper bound on any health value; hit points are packed into 8 bits.
inline constexpr int kMaxHealth = 255;

// Parses and checks a flat attribute object. Throws Error(MissingAttribute)
// or Error(OutOfRange) naming the first offending attribute in canonical order.
Config validate_config(const nlohmann::json& raw);

// Re-checks an in-memory Config against the same constraints.
void check_config(const Config& config);

nlohmann::json to_json(const Config& config);

// FNV-1a over the canonical numeric attributes; season_id is not hashed.
std::uint64_t config_hash(const Config& config);
std::string config_hash_hex(const Config& config);

Config season1_defaults();
Config season2_defaults();

// All eight characters share one stat line and the extra attributes sit at
// their minimum legal values.
Config identical_characters_config();

}  // namespace rpglite
