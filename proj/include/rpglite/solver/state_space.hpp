#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rpglite/core/config.hpp"
#include "rpglite/core/move.hpp"
#include "rpglite/core/rules.hpp"
#include "rpglite/core/state.hpp"

namespace rpglite::solver {

struct Matchup {
  Pair pair0;
  Pair pair1;

  Matchup swapped() const { return {pair1, pair0}; }
  auto operator<=>(const Matchup&) const = default;
};

enum class StateRole : std::uint8_t { Win0, Win1, Turn0, Turn1 };

inline constexpr std::size_t kDefaultStateBudget = 10'000'000;

// Explicit state graph of one matchup: every state reachable from both
// initial states (either side moving first) under forfeit-free play, indexed
// in ascending StateKey order. Successor distributions are stored once per
// (state, move) in CSR form.
class StateSpace {
 public:
  // Throws Error(StateBudgetExceeded) once more than `budget` states are found.
  static StateSpace enumerate(const Matchup& matchup, const Config& config,
                              std::size_t budget = kDefaultStateBudget);

  const Matchup& matchup() const { return matchup_; }
  const Config& config() const { return config_; }

  std::size_t size() const { return keys_.size(); }
  StateKey key(std::size_t i) const { return keys_[i]; }
  GameState state(std::size_t i) const { return decode_state_key(keys_[i]); }
  std::optional<std::size_t> find(StateKey key) const;
  std::optional<std::size_t> find(const GameState& state) const { return find(state_key(state)); }
  std::size_t initial(Side first_mover) const { return initial_[first_mover]; }

  StateRole role(std::size_t i) const { return roles_[i]; }
  bool terminal(std::size_t i) const { return roles_[i] == StateRole::Win0 || roles_[i] == StateRole::Win1; }
  // Side to act; meaningful for non-terminal states only.
  Side mover(std::size_t i) const { return roles_[i] == StateRole::Turn1 ? 1 : 0; }

  std::size_t move_count(std::size_t i) const { return state_begin_[i + 1] - state_begin_[i]; }
  std::span<const Move> moves(std::size_t i) const {
    return {moves_.data() + state_begin_[i], move_count(i)};
  }
  // Global move id of move `m` of state `i`.
  std::size_t move_id(std::size_t i, std::size_t m) const { return state_begin_[i] + m; }
  std::span<const double> probabilities(std::size_t move_id) const {
    return {probs_.data() + move_begin_[move_id], move_begin_[move_id + 1] - move_begin_[move_id]};
  }
  std::span<const std::uint32_t> successors(std::size_t move_id) const {
    return {succ_.data() + move_begin_[move_id], move_begin_[move_id + 1] - move_begin_[move_id]};
  }

  // States grouped by strongly connected component, sinks first: every edge
  // leaving a component points into an earlier one.
  std::span<const std::uint32_t> component_order() const { return component_order_; }
  std::span<const std::uint32_t> component_begin() const { return component_begin_; }
  // True when the component is a single state with no self-loop.
  bool trivial_component(std::size_t c) const { return trivial_[c] != 0; }

  std::size_t edge_count() const { return succ_.size(); }

 private:
  void build_components();

  Matchup matchup_{};
  Config config_;
  std::vector<StateKey> keys_;
  std::vector<StateRole> roles_;
  std::array<std::size_t, 2> initial_{};
  std::vector<std::uint32_t> state_begin_;  // size()+1
  std::vector<Move> moves_;
  std::vector<std::uint32_t> move_begin_;  // moves_.size()+1
  std::vector<double> probs_;
  std::vector<std::uint32_t> succ_;
  std::vector<std::uint32_t> component_order_;
  std::vector<std::uint32_t> component_begin_;
  std::vector<std::uint8_t> trivial_;
};

}  // namespace rpglite::solver
