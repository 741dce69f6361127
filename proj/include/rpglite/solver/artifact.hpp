#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rpglite/solver/solve.hpp"

// Solved-matchup artifact. One file per unordered matchup (pair0 index <=
// pair1 index) per config hash:
//
//   <dir>/<config hash>/<a>-<b>_vs_<c>-<d>.rpgsol
//
//   bytes 0..7   "RPGLSOL1"
//   u32 LE       header length H
//   H bytes      JSON header {config_hash, matchup, season_id, states, tolerance, version}
//   states x     u64 key | f64 v0 | f64 v1 | u16 move code   (little endian, ascending key)
//
// v0/v1 are the minimax probabilities that side 0 / side 1 wins, each solved
// with that side as maximizer. The move is the mover's optimal move (its own
// solve, canonical tie-breaking); 0xFFFF at terminal states.
namespace rpglite::solver {

inline constexpr std::uint16_t kNoMove = 0xFFFF;

struct SolvedMatchup {
  Matchup matchup{};
  std::string config_hash;
  std::string season_id;
  double tolerance = kDefaultTolerance;
  std::vector<StateKey> keys;  // ascending
  std::vector<double> value[2];
  std::vector<std::uint16_t> best;

  std::optional<std::size_t> find(StateKey key) const;
};

SolvedMatchup solve_matchup(const StateSpace& space, double tol = kDefaultTolerance);

void write_artifact(const std::filesystem::path& path, const SolvedMatchup& solved);
// Throws Error(MissingArtifact) if absent, Error(SchemaViolation) if malformed.
SolvedMatchup read_artifact(const std::filesystem::path& path);

// A solved matchup seen from an arbitrary ordered matchup: the artifact of the
// unordered pair, with states side-swapped when the order is reversed.
class MatchupValues {
 public:
  MatchupValues(std::shared_ptr<const SolvedMatchup> solved, bool flipped, Config config)
      : solved_(std::move(solved)), flipped_(flipped), config_(std::move(config)) {}

  // Minimax P(side wins) at a state of this matchup. Throws
  // Error(ReplayMismatch) for states outside the reachable space.
  double value(const GameState& state, Side side) const;
  // Mover's optimal move; throws Error(TerminalState) at terminal states.
  Move best_move(const GameState& state) const;
  // Q for every forfeit-free legal move, in canonical order, relative to the mover.
  std::vector<std::pair<Move, double>> q_values(const GameState& state) const;
  // Q of one move relative to the mover; Forfeit is 0.
  double q_value(const GameState& state, const Move& move) const;

  const SolvedMatchup& solved() const { return *solved_; }
  const Config& config() const { return config_; }

 private:
  std::size_t index(const GameState& state) const;

  std::shared_ptr<const SolvedMatchup> solved_;
  bool flipped_;
  Config config_;
};

// Directory-backed cache of solved matchups. get() only loads; ensure()
// solves and writes what is missing.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path dir = {}) : dir_(std::move(dir)) {}

  static std::filesystem::path file_for(const std::filesystem::path& dir, const std::string& hash,
                                        const Matchup& unordered);

  // Throws Error(MissingArtifact) when neither memory nor disk has it.
  MatchupValues get(const Config& config, const Matchup& matchup);
  MatchupValues ensure(const Config& config, const Matchup& matchup, double tol = kDefaultTolerance);
  void put(const Config& config, SolvedMatchup solved);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::shared_ptr<const SolvedMatchup> lookup(const std::string& hash, const Matchup& unordered);

  std::filesystem::path dir_;
  std::mutex mutex_;
  std::map<std::pair<std::string, Matchup>, std::shared_ptr<const SolvedMatchup>> cache_;
};

// (pair0, pair1) ordered so that pair_index(pair0) <= pair_index(pair1).
Matchup unordered(const Matchup& m);

}  // namespace rpglite::solver
