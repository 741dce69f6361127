#pragma once

#include <cstdint>
#include <string>

namespace rpglite {

enum class MoveKind : std::uint8_t { Attack, Skip, Forfeit };

// Slots are relative: `actor` and `heal_target` index the mover's side,
// `target` and `second_target` index the opposing side.
struct Move {
  MoveKind kind = MoveKind::Skip;
  std::uint8_t actor = 0;
  std::int8_t target = -1;
  std::int8_t second_target = -1;  // Archer only
  std::int8_t heal_target = -1;    // Healer only

  static Move attack(int actor, int target, int second_target = -1, int heal_target = -1) {
    return Move{MoveKind::Attack, static_cast<std::uint8_t>(actor), static_cast<std::int8_t>(target),
                static_cast<std::int8_t>(second_target), static_cast<std::int8_t>(heal_target)};
  }
  static Move skip() { return Move{MoveKind::Skip}; }
  static Move forfeit() { return Move{MoveKind::Forfeit}; }

  bool operator==(const Move&) const = default;
};

// Strict weak order matching the order legal_moves emits.
bool canonical_less(const Move& a, const Move& b);

// 16-bit code used in policy artifacts.
std::uint16_t encode_move(const Move& move);
Move decode_move(std::uint16_t code);

std::string describe(const Move& move);

}  // namespace rpglite
