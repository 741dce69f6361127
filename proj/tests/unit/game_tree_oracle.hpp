#pragma once

// Independent minimax oracle for small configs: memoized recursion over
// GameState values (no packed keys, no state indices, no component order).
// A state met again while still on the recursion stack reads its value from
// the previous pass; passes repeat from all-zero until nothing moves, which
// converges from below to the least fixed point.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rpglite/core/rules.hpp"
#include "test_support.hpp"

namespace rpglite::test_support {

class GameTreeOracle {
 public:
  GameTreeOracle(Pair p0, Pair p1, Config config) : p0_(p0), p1_(p1), config_(std::move(config)) {}

  // Runs passes until the largest change is below `eps`. Returns pass count.
  int solve(double eps = 1e-13, int max_passes = 200000) {
    for (int pass = 1; pass <= max_passes; ++pass) {
      current_.clear();
      for (Side first = 0; first < 2; ++first) value(initial_state(p0_, p1_, first, config_));
      double change = 0.0;
      for (const auto& [s, v] : current_) {
        auto it = previous_.find(s);
        change = std::max(change, std::abs(v - (it == previous_.end() ? 0.0 : it->second)));
      }
      previous_.swap(current_);
      if (change < eps) return pass;
    }
    return max_passes;
  }

  // P(side 0 wins) under side 0 max / side 1 min.
  double at(const GameState& s) const {
    if (auto w = winner(s)) return *w == 0 ? 1.0 : 0.0;
    auto it = previous_.find(without_turn(s));
    return it == previous_.end() ? -1.0 : it->second;
  }

  std::size_t size() const { return previous_.size(); }

 private:
  double value(const GameState& raw) {
    const GameState s = without_turn(raw);
    if (auto w = winner(s)) return *w == 0 ? 1.0 : 0.0;
    if (auto it = current_.find(s); it != current_.end()) return it->second;
    if (on_stack_.count(s)) {
      auto it = previous_.find(s);
      return it == previous_.end() ? 0.0 : it->second;
    }
    on_stack_.insert(s);
    const bool maximize = s.active == 0;
    double best = maximize ? -1.0 : 2.0;
    for (const auto& m : legal_moves(s, config_, MoveSet::NoForfeit)) {
      double q = 0.0;
      for (const auto& b : transition_distribution(s, m, config_)) q += b.probability * value(b.next);
      best = maximize ? std::max(best, q) : std::min(best, q);
    }
    on_stack_.erase(s);
    current_[s] = best;
    return best;
  }

  Pair p0_, p1_;
  Config config_;
  std::map<GameState, double, StateLess> previous_, current_;
  std::set<GameState, StateLess> on_stack_;
};

}  // namespace rpglite::test_support
