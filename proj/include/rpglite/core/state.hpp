#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "rpglite/core/character.hpp"

namespace rpglite {

using Side = std::uint8_t;

constexpr Side other(Side side) { return static_cast<Side>(1 - side); }

struct CharacterState {
  CharacterId id = CharacterId::Knight;
  std::uint8_t hp = 0;
  bool stunned = false;

  bool alive() const { return hp > 0; }
  bool operator==(const CharacterState&) const = default;
};

struct GameState {
  std::array<std::array<CharacterState, 2>, 2> sides{};
  Side active = 0;
  // Acting slot while a Monk keeps its turn after a hit; -1 otherwise.
  std::int8_t chain = -1;
  // Side that forfeited, -1 if none.
  std::int8_t forfeited = -1;
  std::uint32_t turn_count = 0;

  CharacterState& at(Side side, int slot) { return sides[side][static_cast<std::size_t>(slot)]; }
  const CharacterState& at(Side side, int slot) const { return sides[side][static_cast<std::size_t>(slot)]; }

  bool side_alive(Side side) const { return sides[side][0].alive() || sides[side][1].alive(); }
  bool in_chain() const { return chain >= 0; }

  bool operator==(const GameState&) const = default;
};

// Packed 53-bit identity of a state without its turn counter. Solver indices
// are assigned in ascending key order.
using StateKey = std::uint64_t;

StateKey state_key(const GameState& state);
GameState decode_state_key(StateKey key);

// Relabels side 0 as side 1 and vice versa. Moves stay valid under the swap
// because they address slots relative to the acting side.
GameState swapped(const GameState& state);

// Key of the state as seen by `owner`, i.e. with the owner relabelled as side 0.
inline StateKey perspective_key(const GameState& state, Side owner) {
  return state_key(owner == 0 ? state : swapped(state));
}

}  // namespace rpglite
