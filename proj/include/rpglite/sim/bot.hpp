#pragma once

#include <optional>
#include <string>

#include "rpglite/core/rng.hpp"
#include "rpglite/solver/artifact.hpp"

namespace rpglite::sim {

enum class BotKind { Optimal, EpsilonGreedy, Softmax, UniformRandom, AlwaysSkip };
enum class PairPolicy { Fixed, Argmax, Uniform };

struct BotSpec {
  BotKind kind = BotKind::Optimal;
  double epsilon = 0.0;      // EpsilonGreedy
  double tau = 1.0;          // Softmax temperature over Q-values
  std::optional<double> epsilon_end;  // anneal epsilon linearly across a bot's games
  PairPolicy pair_policy = PairPolicy::Uniform;
  std::optional<Pair> pair;  // Fixed
};

// "kind[:param][@pair]" with kind in optimal|epsilon|softmax|uniform|skip,
// epsilon accepting "start~end" for annealing, and pair as "knight,wizard",
// "argmax" or "uniform" (default).
BotSpec parse_bot_spec(const std::string& text);
std::string to_string(const BotSpec& spec);

bool needs_values(const BotSpec& spec);

// A bot bound to a config and an artifact store. Never forfeits.
class Bot {
 public:
  Bot(BotSpec spec, Config config, solver::ArtifactStore* store);

  const BotSpec& spec() const { return spec_; }
  Pair choose_pair(SplitMix64& rng) const;
  // `epsilon` overrides spec().epsilon (annealing schedules).
  Move choose_move(const GameState& state, const solver::Matchup& matchup, SplitMix64& rng,
                   std::optional<double> epsilon = std::nullopt) const;

 private:
  BotSpec spec_;
  Config config_;
  solver::ArtifactStore* store_;
  std::optional<Pair> argmax_pair_;
};

// Validates parameters and, for value-driven kinds or argmax pair choice,
// that every artifact the bot may need is available (or solvable when
// `solve_missing`). Throws Error(OutOfRange) / Error(MissingArtifact).
Bot make_bot(const BotSpec& spec, const Config& config, solver::ArtifactStore* store, bool solve_missing = false);

// Pair with the best mean coin-flip minimax value over all 28 opponents;
// canonical order on ties.
Pair argmax_pair(const Config& config, solver::ArtifactStore& store);

}  // namespace rpglite::sim
