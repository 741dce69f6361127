#include "rpglite/solver/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rpglite/core/error.hpp"

namespace rpglite::solver {

namespace {

enum class Control : std::uint8_t { Max, Min, Chance };

struct Controls {
  std::array<Control, 2> kind{};
  std::array<const BehavioralPolicy*, 2> policy{};
};

// Ties within this margin keep the earlier (canonical) move.
constexpr double kTieMargin = 1e-12;

double move_value(const StateSpace& space, const std::vector<double>& v, std::size_t move_id) {
  auto p = space.probabilities(move_id);
  auto s = space.successors(move_id);
  double q = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) q += p[k] * v[s[k]];
  return q;
}

double terminal_value(const StateSpace& space, std::size_t i, Side target) {
  Side w = space.role(i) == StateRole::Win0 ? 0 : 1;
  return w == target ? 1.0 : 0.0;
}

double backup(const StateSpace& space, const std::vector<double>& v, std::size_t i, Side target,
              const Controls& controls) {
  if (space.terminal(i)) return terminal_value(space, i, target);
  const Side side = space.mover(i);
  const std::size_t first = space.move_id(i, 0);
  const std::size_t count = space.move_count(i);
  switch (controls.kind[side]) {
    case Control::Max: {
      double best = -1.0;
      for (std::size_t m = 0; m < count; ++m) best = std::max(best, move_value(space, v, first + m));
      return best;
    }
    case Control::Min: {
      double best = 2.0;
      for (std::size_t m = 0; m < count; ++m) best = std::min(best, move_value(space, v, first + m));
      return best;
    }
    case Control::Chance: {
      double total = 0.0;
      for (const auto& mw : controls.policy[side]->at(i)) total += mw.weight * move_value(space, v, first + mw.move);
      return total;
    }
  }
  return 0.0;
}

ValueVector run(const StateSpace& space, Side target, const Controls& controls, double tol) {
  ValueVector out;
  out.side = target;
  out.values.assign(space.size(), 0.0);
  auto& v = out.values;
  const auto order = space.component_order();
  const auto begin = space.component_begin();
  const std::size_t components = begin.size() - 1;
  for (std::size_t c = 0; c < components; ++c) {
    const auto first = begin[c];
    const auto last = begin[c + 1];
    if (space.trivial_component(c)) {
      v[order[first]] = backup(space, v, order[first], target, controls);
      ++out.stats.sweeps;
      continue;
    }
    std::size_t sweeps = 0;
    for (;;) {
      double delta = 0.0;
      for (auto k = first; k < last; ++k) {
        const auto s = order[k];
        const double updated = backup(space, v, s, target, controls);
        if (updated < v[s]) out.stats.monotone = false;
        delta = std::max(delta, std::abs(updated - v[s]));
        v[s] = updated;
      }
      ++sweeps;
      if (delta < tol) break;
      if (sweeps >= kSweepCap) {
        out.stats.hit_sweep_cap = true;
        break;
      }
    }
    out.stats.sweeps += sweeps;
    out.stats.max_component_sweeps = std::max(out.stats.max_component_sweeps, sweeps);
  }
  return out;
}

Policy extract(const StateSpace& space, const std::vector<double>& v, Side side, bool maximize) {
  Policy policy;
  policy.side = side;
  policy.choice.assign(space.size(), -1);
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space.terminal(i) || space.mover(i) != side) continue;
    const std::size_t first = space.move_id(i, 0);
    std::size_t best = 0;
    double best_value = move_value(space, v, first);
    for (std::size_t m = 1; m < space.move_count(i); ++m) {
      const double q = move_value(space, v, first + m);
      if (maximize ? q > best_value + kTieMargin : q < best_value - kTieMargin) {
        best = m;
        best_value = q;
      }
    }
    policy.choice[i] = static_cast<std::int16_t>(best);
  }
  return policy;
}

void require_complete(const StateSpace& space, const BehavioralPolicy& policy) {
  if (policy.begin.size() != space.size() + 1) {
    throw Error(ErrorCode::IncompletePolicy, "policy was built for a different state space");
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space.terminal(i) || space.mover(i) != policy.side) continue;
    auto entries = policy.at(i);
    if (entries.empty()) {
      throw Error(ErrorCode::IncompletePolicy, "no move for side " + std::to_string(policy.side) + " at state " +
                                                   std::to_string(i));
    }
    for (const auto& mw : entries) {
      if (mw.move >= space.move_count(i)) throw Error(ErrorCode::IncompletePolicy, "move index out of range");
    }
  }
}

}  // namespace

BehavioralPolicy BehavioralPolicy::from(const StateSpace& space, const Policy& policy) {
  BehavioralPolicy out;
  out.side = policy.side;
  out.begin.reserve(space.size() + 1);
  out.begin.push_back(0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (policy.choice[i] >= 0) out.entries.push_back({static_cast<std::uint16_t>(policy.choice[i]), 1.0});
    out.begin.push_back(static_cast<std::uint32_t>(out.entries.size()));
  }
  return out;
}

BehavioralPolicy BehavioralPolicy::uniform(const StateSpace& space, Side side) {
  BehavioralPolicy out;
  out.side = side;
  out.begin.reserve(space.size() + 1);
  out.begin.push_back(0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!space.terminal(i) && space.mover(i) == side) {
      const auto n = space.move_count(i);
      for (std::size_t m = 0; m < n; ++m) out.entries.push_back({static_cast<std::uint16_t>(m), 1.0 / double(n)});
    }
    out.begin.push_back(static_cast<std::uint32_t>(out.entries.size()));
  }
  return out;
}

BehavioralPolicy BehavioralPolicy::always_skip(const StateSpace& space, Side side) {
  BehavioralPolicy out;
  out.side = side;
  out.begin.reserve(space.size() + 1);
  out.begin.push_back(0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!space.terminal(i) && space.mover(i) == side) {
      auto moves = space.moves(i);
      std::size_t pick = 0;
      for (std::size_t m = 0; m < moves.size(); ++m) {
        if (moves[m].kind == MoveKind::Skip) pick = m;
      }
      out.entries.push_back({static_cast<std::uint16_t>(pick), 1.0});
    }
    out.begin.push_back(static_cast<std::uint32_t>(out.entries.size()));
  }
  return out;
}

MinimaxSolution solve_minimax(const StateSpace& space, double tol, Side maximizer) {
  Controls controls;
  controls.kind[maximizer] = Control::Max;
  controls.kind[other(maximizer)] = Control::Min;
  MinimaxSolution solution;
  solution.values = run(space, maximizer, controls, tol);
  solution.policies[maximizer] = extract(space, solution.values.values, maximizer, true);
  solution.policies[other(maximizer)] = extract(space, solution.values.values, other(maximizer), false);
  return solution;
}

BestResponse best_response(const StateSpace& space, const BehavioralPolicy& opponent, double tol) {
  require_complete(space, opponent);
  const Side me = other(opponent.side);
  Controls controls;
  controls.kind[me] = Control::Max;
  controls.kind[opponent.side] = Control::Chance;
  controls.policy[opponent.side] = &opponent;
  BestResponse out;
  out.values = run(space, me, controls, tol);
  out.policy = extract(space, out.values.values, me, true);
  return out;
}

Evaluation evaluate(const StateSpace& space, const BehavioralPolicy& policy0, const BehavioralPolicy& policy1,
                    double tol) {
  if (policy0.side != 0 || policy1.side != 1) {
    throw Error(ErrorCode::IncompletePolicy, "evaluate expects policies for side 0 and side 1");
  }
  require_complete(space, policy0);
  require_complete(space, policy1);
  Controls controls;
  controls.kind = {Control::Chance, Control::Chance};
  controls.policy = {&policy0, &policy1};
  return Evaluation{run(space, 0, controls, tol), run(space, 1, controls, tol)};
}

double coin_flip_value(const StateSpace& space, const ValueVector& values) {
  return 0.5 * (values[space.initial(0)] + values[space.initial(1)]);
}

std::vector<std::pair<Move, double>> q_values(const StateSpace& space, const ValueVector& values,
                                              std::size_t state, MoveSet set) {
  if (space.terminal(state)) throw Error(ErrorCode::TerminalState, "state " + std::to_string(state));
  std::vector<std::pair<Move, double>> out;
  auto moves = space.moves(state);
  out.reserve(moves.size() + 1);
  for (std::size_t m = 0; m < moves.size(); ++m) {
    out.emplace_back(moves[m], move_value(space, values.values, space.move_id(state, m)));
  }
  if (set == MoveSet::Full && !space.state(state).in_chain()) {
    const Side winner_after = other(space.mover(state));
    out.emplace_back(Move::forfeit(), winner_after == values.side ? 1.0 : 0.0);
  }
  return out;
}

double minimax_residual(const StateSpace& space, const ValueVector& values) {
  Controls controls;
  controls.kind[values.side] = Control::Max;
  controls.kind[other(values.side)] = Control::Min;
  double worst = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    worst = std::max(worst, std::abs(backup(space, values.values, i, values.side, controls) - values[i]));
  }
  return worst;
}

}  // namespace rpglite::solver
