#pragma once

// Test-only helpers. These deliberately avoid the solver library: reachability
// here walks GameState values through std::set, not packed keys.

#include <deque>
#include <functional>
#include <set>
#include <tuple>
#include <vector>

#include "rpglite/core/rules.hpp"

namespace rpglite::test_support {

// Total order on GameState ignoring the turn counter.
struct StateLess {
  static auto tie(const GameState& s) {
    auto c = [](const CharacterState& x) { return std::make_tuple(static_cast<int>(x.id), x.hp, x.stunned); };
    return std::make_tuple(c(s.sides[0][0]), c(s.sides[0][1]), c(s.sides[1][0]), c(s.sides[1][1]), s.active,
                           s.chain, s.forfeited);
  }
  bool operator()(const GameState& a, const GameState& b) const { return tie(a) < tie(b); }
};

inline GameState without_turn(GameState s) {
  s.turn_count = 0;
  return s;
}

// Every state reachable from both initial states of a matchup, forfeit excluded.
inline std::set<GameState, StateLess> reachable(Pair p0, Pair p1, const Config& config) {
  std::set<GameState, StateLess> seen;
  std::deque<GameState> frontier;
  for (Side first = 0; first < 2; ++first) {
    auto s = initial_state(p0, p1, first, config);
    if (seen.insert(s).second) frontier.push_back(s);
  }
  while (!frontier.empty()) {
    auto s = frontier.front();
    frontier.pop_front();
    if (winner(s)) continue;
    for (const auto& m : legal_moves(s, config, MoveSet::NoForfeit)) {
      for (const auto& b : transition_distribution(s, m, config)) {
        auto n = without_turn(b.next);
        if (seen.insert(n).second) frontier.push_back(n);
      }
    }
  }
  return seen;
}

// Config with every health capped at `cap` and the dependent attributes
// clamped so the result stays valid.
inline Config reduced_config(Config base, int cap) {
  for (auto& s : base.stats) s.health = std::min(s.health, cap);
  int max_health = 0;
  for (auto& s : base.stats) max_health = std::max(max_health, s.health);
  base.execute_range = std::min(base.execute_range, max_health - 1);
  base.rage_threshold = std::min(base.rage_threshold, base.of(CharacterId::Barbarian).health);
  base.season_id = "reduced-" + std::to_string(cap);
  return base;
}

}  // namespace rpglite::test_support
