#include "rpglite/core/state.hpp"

#include <tuple>
#include <utility>

#include "rpglite/core/move.hpp"

namespace rpglite {

// Layout, low to high: four 12-bit character fields (side 0 slot 0, side 0
// slot 1, side 1 slot 0, side 1 slot 1), each hp:8 | stunned:1 | id:3; then
// chain:2 (0 none, slot+1), active:1, forfeited:2 (0 none, side+1).
StateKey state_key(const GameState& s) {
  StateKey key = 0;
  int shift = 0;
  for (Side side = 0; side < 2; ++side) {
    for (int slot = 0; slot < 2; ++slot) {
      const auto& c = s.at(side, slot);
      StateKey field = static_cast<StateKey>(c.hp) | (static_cast<StateKey>(c.stunned) << 8) |
                       (static_cast<StateKey>(c.id) << 9);
      key |= field << shift;
      shift += 12;
    }
  }
  key |= static_cast<StateKey>(s.chain + 1) << 48;
  key |= static_cast<StateKey>(s.active) << 50;
  key |= static_cast<StateKey>(s.forfeited + 1) << 51;
  return key;
}

GameState decode_state_key(StateKey key) {
  GameState s;
  int shift = 0;
  for (Side side = 0; side < 2; ++side) {
    for (int slot = 0; slot < 2; ++slot) {
      auto field = (key >> shift) & 0xFFFu;
      auto& c = s.at(side, slot);
      c.hp = static_cast<std::uint8_t>(field & 0xFFu);
      c.stunned = ((field >> 8) & 1u) != 0;
      c.id = static_cast<CharacterId>((field >> 9) & 7u);
      shift += 12;
    }
  }
  s.chain = static_cast<std::int8_t>(static_cast<int>((key >> 48) & 3u) - 1);
  s.active = static_cast<Side>((key >> 50) & 1u);
  s.forfeited = static_cast<std::int8_t>(static_cast<int>((key >> 51) & 3u) - 1);
  return s;
}

GameState swapped(const GameState& state) {
  GameState s = state;
  std::swap(s.sides[0], s.sides[1]);
  s.active = other(state.active);
  if (state.forfeited >= 0) s.forfeited = static_cast<std::int8_t>(1 - state.forfeited);
  return s;
}

namespace {

auto rank(const Move& m) {
  return std::make_tuple(static_cast<int>(m.kind), static_cast<int>(m.actor), m.second_target >= 0,
                         static_cast<int>(m.target), static_cast<int>(m.second_target),
                         static_cast<int>(m.heal_target));
}

}  // namespace

bool canonical_less(const Move& a, const Move& b) { return rank(a) < rank(b); }

// kind:2 | actor:1 | target+1:2 | second_target+1:2 | heal_target+1:2
std::uint16_t encode_move(const Move& m) {
  return static_cast<std::uint16_t>(static_cast<unsigned>(m.kind) | (static_cast<unsigned>(m.actor) << 2) |
                                    (static_cast<unsigned>(m.target + 1) << 3) |
                                    (static_cast<unsigned>(m.second_target + 1) << 5) |
                                    (static_cast<unsigned>(m.heal_target + 1) << 7));
}

Move decode_move(std::uint16_t code) {
  Move m;
  m.kind = static_cast<MoveKind>(code & 3u);
  m.actor = static_cast<std::uint8_t>((code >> 2) & 1u);
  m.target = static_cast<std::int8_t>(static_cast<int>((code >> 3) & 3u) - 1);
  m.second_target = static_cast<std::int8_t>(static_cast<int>((code >> 5) & 3u) - 1);
  m.heal_target = static_cast<std::int8_t>(static_cast<int>((code >> 7) & 3u) - 1);
  return m;
}

std::string describe(const Move& m) {
  switch (m.kind) {
    case MoveKind::Skip: return "skip";
    case MoveKind::Forfeit: return "forfeit";
    case MoveKind::Attack: break;
  }
  std::string out = "attack a" + std::to_string(m.actor) + "->t" + std::to_string(m.target);
  if (m.second_target >= 0) out += "+t" + std::to_string(m.second_target);
  if (m.heal_target >= 0) out += " heal a" + std::to_string(m.heal_target);
  return out;
}

}  // namespace rpglite
