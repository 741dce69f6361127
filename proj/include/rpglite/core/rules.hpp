#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rpglite/core/config.hpp"
#include "rpglite/core/move.hpp"
#include "rpglite/core/rng.hpp"
#include "rpglite/core/state.hpp"

namespace rpglite {

// One accuracy roll against one opposing slot.
struct Roll {
  std::uint8_t target = 0;
  bool hit = false;
  std::uint8_t damage = 0;  // hp actually removed
  bool execute = false;
  bool rage = false;
  bool graze = false;

  bool operator==(const Roll&) const = default;
};

struct Events {
  std::array<Roll, 2> rolls{};
  std::uint8_t roll_count = 0;
  std::int8_t heal_target = -1;
  std::uint8_t heal_amount = 0;
  std::int8_t stun_target = -1;
  bool chain = false;

  bool operator==(const Events&) const = default;
};

struct Branch {
  double probability = 0.0;
  GameState next;
  Events events;
};

// Branches have positive probability, pairwise distinct successors and
// probabilities summing to 1.
using TransitionDistribution = std::vector<Branch>;

enum class MoveSet { Full, NoForfeit };

GameState initial_state(Pair pair0, Pair pair1, Side first_mover, const Config& config);
// Unordered-pair form; throws Error(DuplicateCharacter) on a repeated id.
GameState initial_state(CharacterId a0, CharacterId b0, CharacterId a1, CharacterId b1, Side first_mover,
                        const Config& config);

std::optional<Side> winner(const GameState& state);

// Canonical order: attacks by actor slot then payload (Archer single targets
// before the pair), then Skip, then Forfeit. Throws Error(GameOver) on a
// terminal state.
std::vector<Move> legal_moves(const GameState& state, const Config& config, MoveSet set = MoveSet::Full);

bool is_legal(const GameState& state, const Move& move, const Config& config);

// Throws Error(IllegalMove) when the move is not legal in the state.
TransitionDistribution transition_distribution(const GameState& state, const Move& move, const Config& config);

// Same as transition_distribution but skips the legality check; the solver
// calls it only with moves it just generated.
TransitionDistribution transition_distribution_unchecked(const GameState& state, const Move& move,
                                                         const Config& config);

// Forfeit by either side at any moment, mover or not, chain or not.
// Throws Error(GameOver) on a terminal state.
GameState forfeit_state(const GameState& state, Side side);

// Draws one branch with a single uniform() from the generator, walking the
// branches in order and taking the first whose cumulative mass exceeds it.
Branch sample_transition(const GameState& state, const Move& move, const Config& config, SplitMix64& rng);

}  // namespace rpglite
