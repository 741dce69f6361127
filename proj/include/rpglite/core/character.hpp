#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

namespace rpglite {

// Canonical order; every tie-break in the project follows it.
enum class CharacterId : std::uint8_t {
  Knight,
  Archer,
  Healer,
  Rogue,
  Wizard,
  Barbarian,
  Monk,
  Gunner,
};

inline constexpr std::size_t kCharacterCount = 8;
inline constexpr std::size_t kPairCount = 28;

inline constexpr std::array<CharacterId, kCharacterCount> kAllCharacters = {
    CharacterId::Knight, CharacterId::Archer,    CharacterId::Healer, CharacterId::Rogue,
    CharacterId::Wizard, CharacterId::Barbarian, CharacterId::Monk,   CharacterId::Gunner,
};

constexpr std::size_t index_of(CharacterId id) { return static_cast<std::size_t>(id); }

std::string_view name_of(CharacterId id);
std::optional<CharacterId> parse_character(std::string_view name);

// Two distinct characters, stored in canonical order (first < second).
struct Pair {
  CharacterId first = CharacterId::Knight;
  CharacterId second = CharacterId::Archer;

  auto operator<=>(const Pair&) const = default;

  // Throws Error(DuplicateCharacter) when a == b.
  static Pair of(CharacterId a, CharacterId b);

  bool contains(CharacterId id) const { return first == id || second == id; }
};

// Dense index 0..27 over pairs in lexicographic canonical order.
std::size_t pair_index(Pair pair);
Pair pair_at(std::size_t index);
const std::array<Pair, kPairCount>& all_pairs();

// "knight,wizard" style text, as used by the CLI and the service.
Pair parse_pair(std::string_view text);
std::string pair_name(Pair pair);

}  // namespace rpglite
