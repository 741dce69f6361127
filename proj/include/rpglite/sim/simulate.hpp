#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "rpglite/sim/bot.hpp"
#include "rpglite/sim/record.hpp"

namespace rpglite::sim {

inline constexpr int kDefaultMoveCap = 1000;

struct SimulationOptions {
  int move_cap = kDefaultMoveCap;
  std::array<std::string, 2> usernames{"bot0", "bot1"};
  std::string game_id = "sim";
  std::int64_t start_ms = 0;
  std::int64_t move_interval_ms = 30'000;  // synthetic time between moves
  std::array<std::optional<double>, 2> epsilon{};  // per-game epsilon overrides
};

// Generator streams of `seed`: 0 = coin flip, 1 and 2 = each bot's pair pick
// and move choices, 3 = move outcomes. A game is a pure function of its inputs.
GameRecord simulate_game(const Bot& bot0, const Bot& bot1, const Config& config, std::uint64_t seed,
                         const SimulationOptions& options = {});

}  // namespace rpglite::sim
