#include "rpglite/core/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "rpglite/core/error.hpp"

namespace rpglite {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

int small_int(const json& j, const char* field, int lo, int hi) {
  if (!j.contains(field) || !j[field].is_number_integer()) bad(std::string("missing integer field ") + field);
  int v = j[field].get<int>();
  if (v < lo || v > hi) bad(std::string("field out of range: ") + field);
  return v;
}

int optional_slot(const json& j, const char* field) {
  if (!j.contains(field) || j[field].is_null()) return -1;
  if (!j[field].is_number_integer()) bad(std::string("slot must be an integer: ") + field);
  int v = j[field].get<int>();
  if (v < 0 || v > 1) bad(std::string("slot out of range: ") + field);
  return v;
}

CharacterId character_from_json(const json& j) {
  if (!j.is_string()) bad("character id must be a string");
  auto id = parse_character(j.get<std::string>());
  if (!id) bad("unknown character " + j.get<std::string>());
  return *id;
}

}  // namespace

json to_json(const GameState& s) {
  json sides = json::array();
  for (Side side = 0; side < 2; ++side) {
    json row = json::array();
    for (int slot = 0; slot < 2; ++slot) {
      const auto& c = s.at(side, slot);
      row.push_back({{"id", std::string(name_of(c.id))}, {"hp", c.hp}, {"stunned", c.stunned}});
    }
    sides.push_back(std::move(row));
  }
  return json{{"sides", std::move(sides)},
              {"active", s.active},
              {"chain", s.chain >= 0 ? json(s.chain) : json(nullptr)},
              {"forfeited", s.forfeited >= 0 ? json(s.forfeited) : json(nullptr)},
              {"turn", s.turn_count}};
}

GameState game_state_from_json(const json& j) {
  if (!j.is_object() || !j.contains("sides") || !j["sides"].is_array() || j["sides"].size() != 2) {
    bad("state needs two sides");
  }
  GameState s;
  for (Side side = 0; side < 2; ++side) {
    const auto& row = j["sides"][side];
    if (!row.is_array() || row.size() != 2) bad("each side needs two characters");
    for (int slot = 0; slot < 2; ++slot) {
      const auto& c = row[static_cast<std::size_t>(slot)];
      if (!c.is_object() || !c.contains("id")) bad("character entry needs an id");
      auto& out = s.at(side, slot);
      out.id = character_from_json(c["id"]);
      out.hp = static_cast<std::uint8_t>(small_int(c, "hp", 0, kMaxHealth));
      out.stunned = c.value("stunned", false);
    }
  }
  s.active = static_cast<Side>(small_int(j, "active", 0, 1));
  s.chain = static_cast<std::int8_t>(optional_slot(j, "chain"));
  s.forfeited = static_cast<std::int8_t>(optional_slot(j, "forfeited"));
  if (j.contains("turn")) {
    if (!j["turn"].is_number_unsigned()) bad("turn must be a non-negative integer");
    s.turn_count = j["turn"].get<std::uint32_t>();
  }
  return s;
}

json to_json(const Move& m) {
  switch (m.kind) {
    case MoveKind::Skip: return json{{"kind", "skip"}};
    case MoveKind::Forfeit: return json{{"kind", "forfeit"}};
    case MoveKind::Attack: break;
  }
  json targets = json::array({m.target});
  if (m.second_target >= 0) targets.push_back(m.second_target);
  return json{{"kind", "attack"},
              {"actor", m.actor},
              {"targets", std::move(targets)},
              {"heal", m.heal_target >= 0 ? json(m.heal_target) : json(nullptr)}};
}

Move move_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) bad("move needs a kind");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "skip") return Move::skip();
  if (kind == "forfeit") return Move::forfeit();
  if (kind != "attack") bad("unknown move kind " + kind);
  int actor = small_int(j, "actor", 0, 1);
  if (!j.contains("targets") || !j["targets"].is_array() || j["targets"].empty() || j["targets"].size() > 2) {
    bad("attack needs one or two targets");
  }
  std::array<int, 2> t{-1, -1};
  for (std::size_t i = 0; i < j["targets"].size(); ++i) {
    const auto& v = j["targets"][i];
    if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 1) bad("target slot out of range");
    t[i] = v.get<int>();
  }
  return Move::attack(actor, t[0], t[1], optional_slot(j, "heal"));
}

json to_json(const Events& e) {
  json rolls = json::array();
  for (std::size_t i = 0; i < e.roll_count; ++i) {
    const auto& r = e.rolls[i];
    rolls.push_back({{"target", r.target},
                     {"hit", r.hit},
                     {"damage", r.damage},
                     {"execute", r.execute},
                     {"rage", r.rage},
                     {"graze", r.graze}});
  }
  return json{{"rolls", std::move(rolls)},
              {"heal", e.heal_target >= 0 ? json{{"target", e.heal_target}, {"amount", e.heal_amount}} : json(nullptr)},
              {"stun", e.stun_target >= 0 ? json(e.stun_target) : json(nullptr)},
              {"chain", e.chain}};
}

Events events_from_json(const json& j) {
  if (!j.is_object()) bad("events must be an object");
  Events e;
  if (j.contains("rolls")) {
    if (!j["rolls"].is_array() || j["rolls"].size() > 2) bad("at most two rolls");
    for (const auto& r : j["rolls"]) {
      auto& out = e.rolls[e.roll_count++];
      out.target = static_cast<std::uint8_t>(small_int(r, "target", 0, 1));
      out.hit = r.value("hit", false);
      out.damage = static_cast<std::uint8_t>(small_int(r, "damage", 0, kMaxHealth));
      out.execute = r.value("execute", false);
      out.rage = r.value("rage", false);
      out.graze = r.value("graze", false);
    }
  }
  if (j.contains("heal") && !j["heal"].is_null()) {
    e.heal_target = static_cast<std::int8_t>(small_int(j["heal"], "target", 0, 1));
    e.heal_amount = static_cast<std::uint8_t>(small_int(j["heal"], "amount", 0, kMaxHealth));
  }
  e.stun_target = static_cast<std::int8_t>(optional_slot(j, "stun"));
  e.chain = j.value("chain", false);
  return e;
}

json to_json(Pair pair) { return json::array({name_of(pair.first), name_of(pair.second)}); }

Pair pair_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) bad("pair must be an array of two character names");
  return Pair::of(character_from_json(j[0]), character_from_json(j[1]));
}

double round_sig9(double value) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return std::strtod(buf, nullptr);
}

}  // namespace rpglite
