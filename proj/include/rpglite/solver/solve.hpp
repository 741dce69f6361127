#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "rpglite/solver/state_space.hpp"

namespace rpglite::solver {

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr std::size_t kSweepCap = 1'000'000;

struct SolveStats {
  std::size_t sweeps = 0;          // state backups / component size, summed
  std::size_t max_component_sweeps = 0;
  bool hit_sweep_cap = false;
  // Cleared if any backup ever lowered a value; iteration from zero is
  // monotone nondecreasing.
  bool monotone = true;
};

// Per-state probability that `side` wins.
struct ValueVector {
  Side side = 0;
  std::vector<double> values;
  SolveStats stats;

  double operator[](std::size_t i) const { return values[i]; }
};

// Deterministic policy: index into space.moves(i) for states where `side`
// acts, -1 elsewhere.
struct Policy {
  Side side = 0;
  std::vector<std::int16_t> choice;

  Move move_at(const StateSpace& space, std::size_t i) const {
    return space.moves(i)[static_cast<std::size_t>(choice[i])];
  }
};

struct MoveWeight {
  std::uint16_t move = 0;  // index into space.moves(i)
  double weight = 0.0;
};

// Per-state distribution over moves for states where `side` acts.
struct BehavioralPolicy {
  Side side = 0;
  std::vector<std::uint32_t> begin;  // size()+1 offsets into entries
  std::vector<MoveWeight> entries;

  std::span<const MoveWeight> at(std::size_t i) const {
    return {entries.data() + begin[i], begin[i + 1] - begin[i]};
  }

  static BehavioralPolicy from(const StateSpace& space, const Policy& policy);
  static BehavioralPolicy uniform(const StateSpace& space, Side side);
  // Plays Skip wherever it is legal, the first continuation during a chain.
  static BehavioralPolicy always_skip(const StateSpace& space, Side side);
};

struct MinimaxSolution {
  ValueVector values;              // P(values.side wins) under optimal play
  std::array<Policy, 2> policies;  // maximizer and minimizer
};

// Turn-based zero-sum reachability: `maximizer` maximizes its probability of
// winning, the opponent minimizes it. Value iteration from the all-zero
// vector (least fixed point), components processed sinks first, each one
// swept until the sup-norm update drops below `tol`. Policies take the
// extremal move; ties go to the earlier move in canonical order.
MinimaxSolution solve_minimax(const StateSpace& space, double tol = kDefaultTolerance, Side maximizer = 0);

struct BestResponse {
  Policy policy;
  ValueVector values;  // P(responder wins)
};

// The opponent's states become chance nodes over its move distribution; the
// other side maximizes. Throws Error(IncompletePolicy) if the opponent policy
// leaves one of its decision states empty.
BestResponse best_response(const StateSpace& space, const BehavioralPolicy& opponent,
                           double tol = kDefaultTolerance);

struct Evaluation {
  ValueVector win0;
  ValueVector win1;
};

// Both sides fixed: a Markov chain. win0[i] + win1[i] <= 1; the shortfall is
// the probability of never finishing.
Evaluation evaluate(const StateSpace& space, const BehavioralPolicy& policy0, const BehavioralPolicy& policy1,
                    double tol = kDefaultTolerance);

// Mean over the two first movers.
double coin_flip_value(const StateSpace& space, const ValueVector& values);

// Q(s, a) = sum p * V(s') for each move at a non-terminal state, in canonical
// order. With MoveSet::Full, Forfeit is appended with its exact value: 0 for
// the side that forfeits. Throws Error(TerminalState) on terminal states.
std::vector<std::pair<Move, double>> q_values(const StateSpace& space, const ValueVector& values,
                                              std::size_t state, MoveSet set = MoveSet::NoForfeit);

// Largest |V(s) - backup(s)| under the minimax operator for `values.side`.
double minimax_residual(const StateSpace& space, const ValueVector& values);

}  // namespace rpglite::solver
