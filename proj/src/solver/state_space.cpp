#include "rpglite/solver/state_space.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "rpglite/core/error.hpp"

namespace rpglite::solver {

namespace {

GameState normalized(GameState s) {
  s.turn_count = 0;
  return s;
}

}  // namespace

StateSpace StateSpace::enumerate(const Matchup& matchup, const Config& config, std::size_t budget) {
  StateSpace space;
  space.matchup_ = matchup;
  space.config_ = config;

  // Breadth-first closure over keys.
  std::unordered_set<StateKey> seen;
  std::vector<StateKey> frontier;
  for (Side first = 0; first < 2; ++first) {
    auto key = state_key(initial_state(matchup.pair0, matchup.pair1, first, config));
    if (seen.insert(key).second) frontier.push_back(key);
  }
  std::vector<StateKey> next;
  while (!frontier.empty()) {
    next.clear();
    for (StateKey key : frontier) {
      GameState s = decode_state_key(key);
      if (winner(s)) continue;
      for (const auto& move : legal_moves(s, config, MoveSet::NoForfeit)) {
        for (const auto& branch : transition_distribution_unchecked(s, move, config)) {
          auto k = state_key(branch.next);
          if (seen.insert(k).second) {
            if (seen.size() > budget) {
              throw Error(ErrorCode::StateBudgetExceeded,
                          "more than " + std::to_string(budget) + " states for " + pair_name(matchup.pair0) +
                              " vs " + pair_name(matchup.pair1));
            }
            next.push_back(k);
          }
        }
      }
    }
    frontier.swap(next);
  }

  space.keys_.assign(seen.begin(), seen.end());
  std::sort(space.keys_.begin(), space.keys_.end());
  const std::size_t n = space.keys_.size();
  for (Side first = 0; first < 2; ++first) {
    space.initial_[first] = *space.find(state_key(initial_state(matchup.pair0, matchup.pair1, first, config)));
  }

  space.roles_.resize(n);
  space.state_begin_.reserve(n + 1);
  space.state_begin_.push_back(0);
  space.move_begin_.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    GameState s = decode_state_key(space.keys_[i]);
    if (auto w = winner(s)) {
      space.roles_[i] = *w == 0 ? StateRole::Win0 : StateRole::Win1;
    } else {
      space.roles_[i] = s.active == 0 ? StateRole::Turn0 : StateRole::Turn1;
      for (const auto& move : legal_moves(s, config, MoveSet::NoForfeit)) {
        space.moves_.push_back(move);
        for (const auto& branch : transition_distribution_unchecked(s, move, config)) {
          space.probs_.push_back(branch.probability);
          space.succ_.push_back(static_cast<std::uint32_t>(*space.find(state_key(normalized(branch.next)))));
        }
        space.move_begin_.push_back(static_cast<std::uint32_t>(space.succ_.size()));
      }
    }
    space.state_begin_.push_back(static_cast<std::uint32_t>(space.moves_.size()));
  }
  space.build_components();
  return space;
}

std::optional<std::size_t> StateSpace::find(StateKey key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - keys_.begin());
}

// Iterative Tarjan. Components are emitted sinks first, which is the order
// value iteration needs.
void StateSpace::build_components() {
  const std::size_t n = size();
  constexpr std::uint32_t kUnvisited = 0xFFFFFFFFu;
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<std::uint8_t> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  struct Frame {
    std::uint32_t state;
    std::uint32_t edge;  // position in the state's flattened successor range
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0;

  auto edge_range = [this](std::uint32_t s) {
    std::size_t first_move = state_begin_[s];
    std::size_t last_move = state_begin_[s + 1];
    return std::pair<std::size_t, std::size_t>{move_begin_[first_move], move_begin_[last_move]};
  };

  component_order_.clear();
  component_order_.reserve(n);
  component_begin_.assign(1, 0);
  trivial_.clear();

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& frame = call.back();
      auto [first, last] = edge_range(frame.state);
      std::size_t e = first + frame.edge;
      if (e < last) {
        ++frame.edge;
        std::uint32_t w = succ_[e];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[frame.state] = std::min(low[frame.state], index[w]);
        }
        continue;
      }
      std::uint32_t v = frame.state;
      call.pop_back();
      if (!call.empty()) low[call.back().state] = std::min(low[call.back().state], low[v]);
      if (low[v] == index[v]) {
        std::size_t start = component_order_.size();
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          component_order_.push_back(w);
        } while (w != v);
        std::sort(component_order_.begin() + static_cast<std::ptrdiff_t>(start), component_order_.end());
        bool trivial = component_order_.size() - start == 1;
        if (trivial) {
          auto [a, b] = edge_range(v);
          for (std::size_t k = a; k < b; ++k) trivial = trivial && succ_[k] != v;
        }
        component_begin_.push_back(static_cast<std::uint32_t>(component_order_.size()));
        trivial_.push_back(trivial ? 1 : 0);
      }
    }
  }
}

}  // namespace rpglite::solver
