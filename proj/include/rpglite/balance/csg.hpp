#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpglite/solver/solve.hpp"

namespace rpglite::balance {

using PairDistribution = std::array<double, kPairCount>;

// All unordered matchups of one config, enumerated once. Index k holds the
// space for (pair_at(i), pair_at(j)) with i <= j.
class SpaceSet {
 public:
  static SpaceSet build(const Config& config, unsigned jobs = 1,
                        std::size_t budget = solver::kDefaultStateBudget);

  const Config& config() const { return config_; }
  std::size_t size() const { return spaces_.size(); }
  const solver::StateSpace& at(std::size_t k) const { return spaces_[k]; }
  // Space holding matchup (a, b) in either order, and the side `a` plays in it.
  std::pair<const solver::StateSpace*, Side> find(std::size_t a, std::size_t b) const;
  std::size_t total_states() const;

 private:
  Config config_;
  std::vector<solver::StateSpace> spaces_;
  std::array<std::array<std::uint32_t, kPairCount>, kPairCount> slot_{};
};

// Deterministic per-matchup policy stored by perspective key (the state as
// seen with the owner on side 0), so it applies whichever side the owner
// occupies in a state space.
struct KeyedPolicy {
  std::vector<StateKey> keys;  // ascending
  std::vector<std::uint16_t> moves;

  std::optional<std::uint16_t> find(StateKey key) const;
  static KeyedPolicy from(const solver::StateSpace& space, Side owner, const solver::Policy& policy);
};

struct Strategy {
  std::string label;
  PairDistribution pair_choice{};
  bool uniform_play = false;  // uniform over legal moves everywhere
  // (own pair index, opponent pair index) -> policy.
  std::map<std::pair<std::size_t, std::size_t>, KeyedPolicy> policies;

  static Strategy uniform_random();
};

struct Metagame {
  std::vector<std::shared_ptr<const Strategy>> members;
  std::vector<double> weights;  // positive, sum to 1
  int generation = 0;
};

// Weight-averaged pair distribution. Throws Error(EmptyMetagame).
PairDistribution aggregate_pairs(const Metagame& metagame);

// Opponent move distribution at one decision state, for an opponent playing
// `own_pair` against `opp_pair`. Member m counts with weight w_m * pc_m(own_pair),
// renormalized; members with no policy at the state are skipped. `moves` are the
// legal moves at the state in canonical order; returned weights index into it.
std::vector<solver::MoveWeight> aggregate_at(const Metagame& metagame, std::size_t own_pair, std::size_t opp_pair,
                                             StateKey perspective, std::span<const Move> moves);

// The aggregated behavior of side `side` in `space`, as a behavioral policy.
solver::BehavioralPolicy aggregate_policy(const Metagame& metagame, const solver::StateSpace& space, Side side);

struct StepResult {
  std::shared_ptr<const Strategy> strategy;
  double value = 0.0;                   // expected win probability vs the metagame
  std::vector<std::size_t> argmax;      // pair indices
  PairDistribution pair_scores{};       // per own pair, vs the aggregated metagame
  std::array<double, kCharacterCount> character_frequency{};
};

// One best-response generation against the metagame.
StepResult csg_step(const Metagame& metagame, const SpaceSet& spaces, double tol = solver::kDefaultTolerance,
                    unsigned jobs = 1, const std::string& label = "step");

// Strategy playing every pair uniformly with minimax-optimal in-game policies.
Strategy minimax_strategy(const SpaceSet& spaces, double tol = solver::kDefaultTolerance, unsigned jobs = 1);

struct CsgParameters {
  int iterations = 10;
  double epsilon = 0.01;
  int window = 0;  // most recent members kept; 0 = all
  double tolerance = solver::kDefaultTolerance;
};

struct CsgIteration {
  int iteration = 0;
  std::string label;
  double value = 0.0;
  std::vector<std::size_t> argmax;
  PairDistribution pair_choice{};
  PairDistribution pair_scores{};
  std::array<double, kCharacterCount> character_frequency{};
};

struct CsgTrace {
  std::string config_hash;
  std::string season_id;
  CsgParameters parameters;
  std::vector<CsgIteration> iterations;  // [0] is the seed population
  bool stopped_early = false;

  // Character usage averaged over the iterations' argmax sets (seed excluded;
  // uniform when there are none).
  std::array<double, kCharacterCount> usage() const;
};

// Deterministic for fixed (config, parameters); `jobs` changes only speed.
CsgTrace run_csg(const SpaceSet& spaces, const CsgParameters& parameters, unsigned jobs = 1);
CsgTrace run_csg(const Config& config, const CsgParameters& parameters, unsigned jobs = 1);

nlohmann::json to_json(const CsgTrace& trace);

std::array<double, kCharacterCount> character_frequency(const PairDistribution& pairs);

}  // namespace rpglite::balance
