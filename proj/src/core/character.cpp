#include "rpglite/core/character.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "rpglite/core/error.hpp"

namespace rpglite {

namespace {

constexpr std::array<std::string_view, kCharacterCount> kNames = {
    "knight", "archer", "healer", "rogue", "wizard", "barbarian", "monk", "gunner",
};

std::array<Pair, kPairCount> build_pairs() {
  std::array<Pair, kPairCount> pairs{};
  std::size_t n = 0;
  for (std::size_t a = 0; a < kCharacterCount; ++a) {
    for (std::size_t b = a + 1; b < kCharacterCount; ++b) {
      pairs[n++] = Pair{kAllCharacters[a], kAllCharacters[b]};
    }
  }
  return pairs;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingAttribute: return "MissingAttribute";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DuplicateCharacter: return "DuplicateCharacter";
    case ErrorCode::GameOver: return "GameOver";
    case ErrorCode::IllegalMove: return "IllegalMove";
    case ErrorCode::StateBudgetExceeded: return "StateBudgetExceeded";
    case ErrorCode::IncompletePolicy: return "IncompletePolicy";
    case ErrorCode::TerminalState: return "TerminalState";
    case ErrorCode::EmptyMetagame: return "EmptyMetagame";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::ReplayMismatch: return "ReplayMismatch";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(std::move(detail)) {}

std::string_view name_of(CharacterId id) { return kNames[index_of(id)]; }

std::optional<CharacterId> parse_character(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (std::size_t i = 0; i < kCharacterCount; ++i) {
    if (kNames[i] == lower) return kAllCharacters[i];
  }
  return std::nullopt;
}

Pair Pair::of(CharacterId a, CharacterId b) {
  if (a == b) throw Error(ErrorCode::DuplicateCharacter, std::string(name_of(a)));
  return a < b ? Pair{a, b} : Pair{b, a};
}

const std::array<Pair, kPairCount>& all_pairs() {
  static const std::array<Pair, kPairCount> pairs = build_pairs();
  return pairs;
}

std::size_t pair_index(Pair pair) {
  const auto& pairs = all_pairs();
  auto it = std::lower_bound(pairs.begin(), pairs.end(), pair);
  return static_cast<std::size_t>(it - pairs.begin());
}

Pair pair_at(std::size_t index) { return all_pairs().at(index); }

Pair parse_pair(std::string_view text) {
  auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw Error(ErrorCode::ParseError, "pair must be two comma-separated names: " + std::string(text));
  }
  auto a = parse_character(text.substr(0, comma));
  auto b = parse_character(text.substr(comma + 1));
  if (!a || !b) throw Error(ErrorCode::ParseError, "unknown character in pair: " + std::string(text));
  return Pair::of(*a, *b);
}

std::string pair_name(Pair pair) {
  return std::string(name_of(pair.first)) + "," + std::string(name_of(pair.second));
}

}  // namespace rpglite
