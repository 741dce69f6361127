#include "rpglite/core/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rpglite/core/error.hpp"

namespace rpglite {

namespace {

using nlohmann::json;

enum class Extra { Heal, ExecuteRange, RageThreshold, RageDamage, Graze };

constexpr std::array<std::pair<std::string_view, Extra>, 5> kExtras = {{
    {"healer_heal", Extra::Heal},
    {"rogue_execute_range", Extra::ExecuteRange},
    {"barbarian_rage_threshold", Extra::RageThreshold},
    {"barbarian_rage_damage", Extra::RageDamage},
    {"gunner_graze", Extra::Graze},
}};

std::array<std::string, kAttributeCount> build_names() {
  std::array<std::string, kAttributeCount> names;
  std::size_t n = 0;
  for (auto id : kAllCharacters) {
    std::string base(name_of(id));
    names[n++] = base + "_health";
    names[n++] = base + "_accuracy";
    names[n++] = base + "_damage";
  }
  for (const auto& [name, extra] : kExtras) names[n++] = std::string(name);
  return names;
}

[[noreturn]] void out_of_range(const std::string& name, const std::string& bound) {
  throw Error(ErrorCode::OutOfRange, name + " " + bound);
}

int read_int(const json& raw, const std::string& name) {
  const auto& v = raw.at(name);
  if (!v.is_number()) out_of_range(name, "must be a number");
  double d = v.get<double>();
  if (std::floor(d) != d || std::abs(d) > 1e9) out_of_range(name, "must be an integer");
  return static_cast<int>(d);
}

double read_probability(const json& raw, const std::string& name) {
  const auto& v = raw.at(name);
  if (!v.is_number()) out_of_range(name, "must be a number");
  return v.get<double>();
}

void check_stats(const Config& c) {
  int max_health = 0;
  for (auto id : kAllCharacters) {
    const auto& s = c.of(id);
    std::string base(name_of(id));
    if (s.health < 1 || s.health > kMaxHealth) {
      out_of_range(base + "_health", "must lie in [1, " + std::to_string(kMaxHealth) + "]");
    }
    if (!(s.accuracy > 0.0 && s.accuracy <= 1.0)) out_of_range(base + "_accuracy", "must lie in (0, 1]");
    if (s.damage < 1) out_of_range(base + "_damage", "must be >= 1");
    max_health = std::max(max_health, s.health);
  }
  if (c.heal < 1) out_of_range("healer_heal", "must be >= 1");
  if (c.execute_range < 1 || c.execute_range >= max_health) {
    out_of_range("rogue_execute_range", "must lie in [1, " + std::to_string(max_health) + ")");
  }
  const int barbarian_health = c.of(CharacterId::Barbarian).health;
  if (c.rage_threshold < 1 || c.rage_threshold > barbarian_health) {
    out_of_range("barbarian_rage_threshold", "must lie in [1, " + std::to_string(barbarian_health) + "]");
  }
  const int barbarian_damage = c.of(CharacterId::Barbarian).damage;
  if (c.rage_damage <= barbarian_damage) {
    out_of_range("barbarian_rage_damage", "must be > " + std::to_string(barbarian_damage));
  }
  const int gunner_damage = c.of(CharacterId::Gunner).damage;
  if (c.graze < 0 || c.graze >= gunner_damage) {
    out_of_range("gunner_graze", "must lie in [0, " + std::to_string(gunner_damage) + ")");
  }
}

Config make(std::string season, std::array<CharacterStats, kCharacterCount> stats, int heal, int execute_range,
            int rage_threshold, int rage_damage, int graze) {
  Config c;
  c.season_id = std::move(season);
  c.stats = stats;
  c.heal = heal;
  c.execute_range = execute_range;
  c.rage_threshold = rage_threshold;
  c.rage_damage = rage_damage;
  c.graze = graze;
  return c;
}

}  // namespace

const std::array<std::string, kAttributeCount>& attribute_names() {
  static const auto names = build_names();
  return names;
}

Config validate_config(const json& raw) {
  if (!raw.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  for (const auto& name : attribute_names()) {
    if (!raw.contains(name)) throw Error(ErrorCode::MissingAttribute, name);
  }
  Config c;
  c.season_id = raw.contains("season_id") && raw["season_id"].is_string() ? raw["season_id"].get<std::string>() : "";
  for (auto id : kAllCharacters) {
    std::string base(name_of(id));
    auto& s = c.of(id);
    s.health = read_int(raw, base + "_health");
    s.accuracy = read_probability(raw, base + "_accuracy");
    s.damage = read_int(raw, base + "_damage");
  }
  c.heal = read_int(raw, "healer_heal");
  c.execute_range = read_int(raw, "rogue_execute_range");
  c.rage_threshold = read_int(raw, "barbarian_rage_threshold");
  c.rage_damage = read_int(raw, "barbarian_rage_damage");
  c.graze = read_int(raw, "gunner_graze");
  check_stats(c);
  return c;
}

void check_config(const Config& config) { check_stats(config); }

json to_json(const Config& c) {
  json j = json::object();
  j["season_id"] = c.season_id;
  for (auto id : kAllCharacters) {
    std::string base(name_of(id));
    j[base + "_health"] = c.of(id).health;
    j[base + "_accuracy"] = c.of(id).accuracy;
    j[base + "_damage"] = c.of(id).damage;
  }
  j["healer_heal"] = c.heal;
  j["rogue_execute_range"] = c.execute_range;
  j["barbarian_rage_threshold"] = c.rage_threshold;
  j["barbarian_rage_damage"] = c.rage_damage;
  j["gunner_graze"] = c.graze;
  return j;
}

std::uint64_t config_hash(const Config& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view text) {
    for (unsigned char ch : text) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  char buf[64];
  for (auto id : kAllCharacters) {
    const auto& s = c.of(id);
    std::snprintf(buf, sizeof buf, "%d/%.17g/%d;", s.health, s.accuracy, s.damage);
    mix(buf);
  }
  std::snprintf(buf, sizeof buf, "%d/%d/%d/%d/%d", c.heal, c.execute_range, c.rage_threshold, c.rage_damage,
                c.graze);
  mix(buf);
  return h;
}

std::string config_hash_hex(const Config& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(config)));
  return buf;
}

Config season1_defaults() {
  return make("season-1",
              {{
                  {12, 0.85, 3},  // Knight
                  {9, 0.75, 2},   // Archer
                  {10, 0.85, 2},  // Healer
                  {8, 0.80, 3},   // Rogue
                  {9, 0.70, 2},   // Wizard
                  {11, 0.80, 2},  // Barbarian
                  {9, 0.60, 2},   // Monk
                  {10, 0.65, 3},  // Gunner
              }},
              2, 3, 4, 4, 1);
}

Config season2_defaults() {
  // Healer and Wizard lines are fixed; the other six changes are placeholders.
  return make("season-2",
              {{
                  {11, 0.85, 3},  // Knight
                  {9, 0.80, 2},   // Archer
                  {9, 0.90, 2},   // Healer
                  {9, 0.80, 3},   // Rogue
                  {9, 0.70, 2},   // Wizard
                  {11, 0.75, 2},  // Barbarian
                  {9, 0.65, 2},   // Monk
                  {9, 0.65, 3},   // Gunner
              }},
              2, 3, 4, 4, 1);
}

Config identical_characters_config() {
  CharacterStats line{10, 0.80, 2};
  std::array<CharacterStats, kCharacterCount> stats;
  stats.fill(line);
  return make("identical", stats, 1, 1, 1, 3, 0);
}

}  // namespace rpglite
