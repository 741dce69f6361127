#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "game_tree_oracle.hpp"
#include "rpglite/core/error.hpp"
#include "rpglite/core/rng.hpp"
#include "rpglite/solver/artifact.hpp"
#include "rpglite/solver/solve.hpp"
#include "test_support.hpp"

namespace rpglite {
namespace {

using solver::BehavioralPolicy;
using solver::Matchup;
using solver::StateSpace;
using test_support::reduced_config;

Pair pair(CharacterId a, CharacterId b) { return Pair::of(a, b); }

Config degenerate_config() {
  Config c = season1_defaults();
  for (auto& s : c.stats) s = {2, 1.0, 2};
  c.heal = 1;
  c.execute_range = 1;
  c.rage_threshold = 1;
  c.rage_damage = 3;
  c.graze = 0;
  c.season_id = "degenerate";
  return c;
}

// A handful of matchups that touch every special mechanic.
std::vector<Matchup> spread() {
  using C = CharacterId;
  return {
      {pair(C::Knight, C::Archer), pair(C::Knight, C::Archer)},
      {pair(C::Healer, C::Wizard), pair(C::Rogue, C::Monk)},
      {pair(C::Barbarian, C::Gunner), pair(C::Archer, C::Healer)},
      {pair(C::Monk, C::Wizard), pair(C::Knight, C::Gunner)},
      {pair(C::Healer, C::Monk), pair(C::Healer, C::Monk)},
      {pair(C::Rogue, C::Barbarian), pair(C::Wizard, C::Gunner)},
  };
}

TEST(StateSpaceTest, MatchesBruteForceReachability) {
  Config c = reduced_config(season1_defaults(), 3);
  for (const auto& m : spread()) {
    auto space = StateSpace::enumerate(m, c);
    auto expected = test_support::reachable(m.pair0, m.pair1, c);
    ASSERT_EQ(space.size(), expected.size()) << pair_name(m.pair0) << " vs " << pair_name(m.pair1);
    for (const auto& s : expected) EXPECT_TRUE(space.find(s).has_value());
  }
}

TEST(StateSpaceTest, SizeWithinStructuralBound) {
  Config c = season1_defaults();
  auto space = StateSpace::enumerate({pair(CharacterId::Knight, CharacterId::Healer),
                                      pair(CharacterId::Monk, CharacterId::Wizard)},
                                     c);
  // hp 0..12 for four characters, stun pattern, chain, mover.
  EXPECT_LE(space.size(), std::size_t(13 * 13 * 13 * 13) * 9 * 2 * 3);
  EXPECT_GT(space.size(), 1000u);
}

TEST(StateSpaceTest, EnumerationIsDeterministic) {
  Config c = season1_defaults();
  Matchup m{pair(CharacterId::Archer, CharacterId::Rogue), pair(CharacterId::Barbarian, CharacterId::Gunner)};
  auto a = StateSpace::enumerate(m, c);
  auto b = StateSpace::enumerate(m, c);
  ASSERT_EQ(a.size(), b.size());
  ASSERT_EQ(a.edge_count(), b.edge_count());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.key(i), b.key(i));
}

TEST(StateSpaceTest, ComponentsAreSinksFirst) {
  Config c = reduced_config(season1_defaults(), 4);
  auto space = StateSpace::enumerate(spread()[1], c);
  auto order = space.component_order();
  auto begin = space.component_begin();
  std::vector<std::size_t> comp(space.size());
  for (std::size_t k = 0; k + 1 < begin.size(); ++k) {
    for (auto j = begin[k]; j < begin[k + 1]; ++j) comp[order[j]] = k;
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t m = 0; m < space.move_count(i); ++m) {
      for (auto s : space.successors(space.move_id(i, m))) EXPECT_LE(comp[s], comp[i]);
    }
  }
}

TEST(StateSpaceTest, BudgetIsEnforced) {
  try {
    StateSpace::enumerate(spread()[0], season1_defaults(), 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StateBudgetExceeded);
  }
}

TEST(SolveTest, MatchesGameTreeOracleOnToyConfigs) {
  Config identical = identical_characters_config();
  std::vector<Config> configs = {reduced_config(season1_defaults(), 3), reduced_config(season2_defaults(), 3),
                                 reduced_config(identical, 2)};
  for (const auto& c : configs) {
    for (const auto& m : spread()) {
      auto space = StateSpace::enumerate(m, c);
      auto solution = solver::solve_minimax(space, 1e-13);
      test_support::GameTreeOracle oracle(m.pair0, m.pair1, c);
      oracle.solve();
      for (std::size_t i = 0; i < space.size(); ++i) {
        ASSERT_NEAR(solution.values[i], oracle.at(space.state(i)), 1e-8)
            << c.season_id << " " << pair_name(m.pair0) << " vs " << pair_name(m.pair1) << " state " << i;
      }
    }
  }
}

TEST(SolveTest, MirrorIsHalf) {
  Config c = season1_defaults();
  for (auto p : {pair(CharacterId::Knight, CharacterId::Archer), pair(CharacterId::Rogue, CharacterId::Gunner)}) {
    auto space = StateSpace::enumerate({p, p}, c);
    auto sol = solver::solve_minimax(space);
    EXPECT_NEAR(solver::coin_flip_value(space, sol.values), 0.5, 2e-9);
  }
}

TEST(SolveTest, DegenerateConfigFirstMoverWinsEveryMirror) {
  Config c = degenerate_config();
  for (auto p : all_pairs()) {
    auto space = StateSpace::enumerate({p, p}, c);
    auto sol = solver::solve_minimax(space);
    EXPECT_NEAR(sol.values[space.initial(0)], 1.0, 1e-12) << pair_name(p);
    EXPECT_NEAR(sol.values[space.initial(1)], 0.0, 1e-12) << pair_name(p);
  }
}

TEST(SolveTest, ValuesAreProbabilitiesAndResidualIsSmall) {
  Config c = reduced_config(season1_defaults(), 6);
  for (const auto& m : spread()) {
    auto space = StateSpace::enumerate(m, c);
    auto sol = solver::solve_minimax(space);
    EXPECT_TRUE(sol.values.stats.monotone);
    EXPECT_FALSE(sol.values.stats.hit_sweep_cap);
    for (double v : sol.values.values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_LT(solver::minimax_residual(space, sol.values), 1e-7);
  }
}

TEST(SolveTest, SidesAreComplementaryWithoutHealers) {
  // Without a Healer every play ends, so P(0 wins) + P(1 wins) = 1 at optimum.
  Config c = season1_defaults();
  Matchup m{pair(CharacterId::Knight, CharacterId::Wizard), pair(CharacterId::Monk, CharacterId::Gunner)};
  auto space = StateSpace::enumerate(m, c);
  auto a = solver::solve_minimax(space, 1e-12, 0);
  auto b = solver::solve_minimax(space, 1e-12, 1);
  for (std::size_t i = 0; i < space.size(); ++i) EXPECT_NEAR(a.values[i] + b.values[i], 1.0, 1e-9);
}

TEST(SolveTest, PoliciesAreBitIdenticalAcrossRuns) {
  Config c = season1_defaults();
  Matchup m{pair(CharacterId::Healer, CharacterId::Rogue), pair(CharacterId::Archer, CharacterId::Barbarian)};
  auto space = StateSpace::enumerate(m, c);
  auto a = solver::solve_minimax(space);
  auto b = solver::solve_minimax(space);
  EXPECT_EQ(a.policies[0].choice, b.policies[0].choice);
  EXPECT_EQ(a.policies[1].choice, b.policies[1].choice);
  EXPECT_EQ(a.values.values, b.values.values);
}

TEST(SolveTest, SwappedMatchupMirrorsValues) {
  Config c = reduced_config(season1_defaults(), 5);
  Matchup m = spread()[2];
  auto space = StateSpace::enumerate(m, c);
  auto flipped = StateSpace::enumerate(m.swapped(), c);
  auto a = solver::solve_minimax(space, 1e-12, 0);
  auto b = solver::solve_minimax(flipped, 1e-12, 1);
  for (std::size_t i = 0; i < space.size(); ++i) {
    auto j = flipped.find(swapped(space.state(i)));
    ASSERT_TRUE(j.has_value());
    EXPECT_NEAR(a.values[i], b.values[*j], 1e-9);
  }
}

TEST(BestResponseTest, AgainstAlwaysSkipWinsSurely) {
  Config c = season1_defaults();
  Matchup m{pair(CharacterId::Knight, CharacterId::Archer), pair(CharacterId::Healer, CharacterId::Wizard)};
  auto space = StateSpace::enumerate(m, c);
  auto br = solver::best_response(space, BehavioralPolicy::always_skip(space, 1));
  EXPECT_GE(br.values[space.initial(0)], 1.0 - 1e-6);
  EXPECT_GE(br.values[space.initial(1)], 1.0 - 1e-6);
}

TEST(BestResponseTest, AgainstMinimaxEqualsMinimax) {
  Config c = season1_defaults();
  Matchup m{pair(CharacterId::Rogue, CharacterId::Gunner), pair(CharacterId::Barbarian, CharacterId::Monk)};
  auto space = StateSpace::enumerate(m, c);
  auto sol = solver::solve_minimax(space, 1e-12);
  auto br = solver::best_response(space, BehavioralPolicy::from(space, sol.policies[1]), 1e-12);
  EXPECT_NEAR(solver::coin_flip_value(space, br.values), solver::coin_flip_value(space, sol.values), 1e-9);
}

TEST(BestResponseTest, AgainstUniformBeatsMinimax) {
  Config c = reduced_config(season1_defaults(), 6);
  for (const auto& m : spread()) {
    auto space = StateSpace::enumerate(m, c);
    auto sol = solver::solve_minimax(space);
    auto br = solver::best_response(space, BehavioralPolicy::uniform(space, 1));
    for (std::size_t i = 0; i < space.size(); ++i) EXPECT_GE(br.values[i], sol.values[i] - 1e-6);
  }
}

TEST(BestResponseTest, IncompletePolicyIsRejected) {
  Config c = reduced_config(season1_defaults(), 3);
  auto space = StateSpace::enumerate(spread()[0], c);
  auto policy = BehavioralPolicy::uniform(space, 1);
  std::size_t victim = 0;
  while (space.terminal(victim) || space.mover(victim) != 1) ++victim;
  policy.entries.erase(policy.entries.begin() + policy.begin[victim], policy.entries.begin() + policy.begin[victim + 1]);
  const auto removed = policy.begin[victim + 1] - policy.begin[victim];
  for (std::size_t i = victim + 1; i < policy.begin.size(); ++i) policy.begin[i] -= removed;
  try {
    solver::best_response(space, policy);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompletePolicy);
  }
}

TEST(EvaluateTest, SkipAgainstSkipNeverEnds) {
  Config c = season1_defaults();
  Matchup m{pair(CharacterId::Knight, CharacterId::Archer), pair(CharacterId::Rogue, CharacterId::Wizard)};
  auto space = StateSpace::enumerate(m, c);
  auto e = solver::evaluate(space, BehavioralPolicy::always_skip(space, 0), BehavioralPolicy::always_skip(space, 1));
  EXPECT_EQ(e.win0[space.initial(0)], 0.0);
  EXPECT_EQ(e.win1[space.initial(0)], 0.0);
}

TEST(EvaluateTest, OptimalAgainstOptimalEqualsMinimax) {
  Config c = season1_defaults();
  Matchup m{pair(CharacterId::Archer, CharacterId::Wizard), pair(CharacterId::Knight, CharacterId::Barbarian)};
  auto space = StateSpace::enumerate(m, c);
  auto sol = solver::solve_minimax(space, 1e-12);
  auto e = solver::evaluate(space, BehavioralPolicy::from(space, sol.policies[0]),
                            BehavioralPolicy::from(space, sol.policies[1]), 1e-12);
  EXPECT_NEAR(solver::coin_flip_value(space, e.win0), solver::coin_flip_value(space, sol.values), 1e-9);
}

TEST(EvaluateTest, UniformPlayMatchesMonteCarlo) {
  Config c = reduced_config(season1_defaults(), 4);
  Matchup m = spread()[1];
  auto space = StateSpace::enumerate(m, c);
  auto u0 = BehavioralPolicy::uniform(space, 0);
  auto u1 = BehavioralPolicy::uniform(space, 1);
  auto e = solver::evaluate(space, u0, u1, 1e-13);
  const double expected = e.win0[space.initial(0)];

  // Independent simulation: uniform over legal_moves, no state indices.
  SplitMix64 rng(20240611);
  const int games = 1'000'000;
  int wins = 0;
  for (int g = 0; g < games; ++g) {
    GameState s = initial_state(m.pair0, m.pair1, 0, c);
    for (int step = 0; step < 10000 && !winner(s); ++step) {
      auto moves = legal_moves(s, c, MoveSet::NoForfeit);
      s = sample_transition(s, moves[rng.below(moves.size())], c, rng).next;
    }
    if (auto w = winner(s); w && *w == 0) ++wins;
  }
  const double p = double(wins) / games;
  const double sigma = std::sqrt(expected * (1 - expected) / games);
  EXPECT_NEAR(p, expected, 3 * sigma);
}

TEST(QValuesTest, BellmanConsistentAndForfeitIsZero) {
  Config c = season1_defaults();
  Matchup m{pair(CharacterId::Healer, CharacterId::Gunner), pair(CharacterId::Rogue, CharacterId::Knight)};
  auto space = StateSpace::enumerate(m, c);
  auto sol = solver::solve_minimax(space);
  for (std::size_t i = 0; i < space.size(); i += 97) {
    if (space.terminal(i)) continue;
    auto q = solver::q_values(space, sol.values, i, MoveSet::Full);
    double best = space.mover(i) == 0 ? -1.0 : 2.0;
    for (const auto& [move, value] : q) {
      if (move.kind == MoveKind::Forfeit) {
        EXPECT_EQ(value, space.mover(i) == 0 ? 0.0 : 1.0);
        continue;
      }
      best = space.mover(i) == 0 ? std::max(best, value) : std::min(best, value);
    }
    EXPECT_NEAR(best, sol.values[i], 1e-8);
    auto chosen = sol.policies[space.mover(i)].move_at(space, i);
    EXPECT_EQ(q[static_cast<std::size_t>(sol.policies[space.mover(i)].choice[i])].first, chosen);
  }
}

TEST(QValuesTest, ForcedKillIsWorthOne) {
  Config c = season1_defaults();
  c.of(CharacterId::Knight).accuracy = 1.0;
  // Knight alone against a 1-hp Rogue: attacking wins outright.
  GameState s = initial_state(pair(CharacterId::Knight, CharacterId::Archer),
                              pair(CharacterId::Rogue, CharacterId::Wizard), 0, c);
  s.sides[0][1].hp = 0;
  s.sides[1][0].hp = 1;
  s.sides[1][1].hp = 0;
  Matchup m{pair(CharacterId::Knight, CharacterId::Archer), pair(CharacterId::Rogue, CharacterId::Wizard)};
  auto space = StateSpace::enumerate(m, c);
  auto i = space.find(s);
  ASSERT_TRUE(i.has_value());
  auto sol = solver::solve_minimax(space);
  auto q = solver::q_values(space, sol.values, *i);
  ASSERT_FALSE(q.empty());
  EXPECT_EQ(q.front().first.kind, MoveKind::Attack);
  EXPECT_DOUBLE_EQ(q.front().second, 1.0);
}

TEST(QValuesTest, TerminalStateThrows) {
  Config c = reduced_config(season1_defaults(), 3);
  auto space = StateSpace::enumerate(spread()[0], c);
  auto sol = solver::solve_minimax(space);
  std::size_t t = 0;
  while (!space.terminal(t)) ++t;
  EXPECT_THROW(solver::q_values(space, sol.values, t), Error);
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rpglite_solver_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(ArtifactTest, RoundTripsThroughDisk) {
  Config c = reduced_config(season1_defaults(), 4);
  auto space = StateSpace::enumerate(spread()[2], c);
  auto solved = solver::solve_matchup(space);
  auto path = scratch_dir("roundtrip") / "a.rpgsol";
  solver::write_artifact(path, solved);
  auto back = solver::read_artifact(path);
  EXPECT_EQ(back.keys, solved.keys);
  EXPECT_EQ(back.value[0], solved.value[0]);
  EXPECT_EQ(back.value[1], solved.value[1]);
  EXPECT_EQ(back.best, solved.best);
  EXPECT_EQ(back.matchup, solved.matchup);
  EXPECT_EQ(back.config_hash, config_hash_hex(c));
}

TEST(ArtifactTest, CorruptFilesAreRejected) {
  Config c = reduced_config(season1_defaults(), 3);
  auto solved = solver::solve_matchup(StateSpace::enumerate(spread()[0], c));
  auto path = scratch_dir("corrupt") / "a.rpgsol";
  solver::write_artifact(path, solved);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
  try {
    solver::read_artifact(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
  }
  try {
    solver::read_artifact(path.parent_path() / "missing.rpgsol");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingArtifact);
  }
}

TEST(ArtifactTest, StoreServesBothOrientations) {
  Config c = reduced_config(season1_defaults(), 4);
  const Matchup m{pair(CharacterId::Wizard, CharacterId::Gunner), pair(CharacterId::Knight, CharacterId::Healer)};
  auto dir = scratch_dir("store");
  solver::ArtifactStore store(dir);
  EXPECT_THROW(store.get(c, m), Error);
  store.ensure(c, m);
  EXPECT_TRUE(std::filesystem::exists(solver::ArtifactStore::file_for(dir, config_hash_hex(c), solver::unordered(m))));

  // A fresh store reads from disk only.
  solver::ArtifactStore reader(dir);
  auto view = reader.get(c, m);
  auto space = StateSpace::enumerate(m, c);
  auto s0 = solver::solve_minimax(space, solver::kDefaultTolerance, 0);
  auto s1 = solver::solve_minimax(space, solver::kDefaultTolerance, 1);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto s = space.state(i);
    EXPECT_NEAR(view.value(s, 0), s0.values[i], 1e-8);
    EXPECT_NEAR(view.value(s, 1), s1.values[i], 1e-8);
    if (space.terminal(i)) continue;
    auto q = view.q_values(s);
    const Side mover = space.mover(i);
    auto expected = solver::q_values(space, mover == 0 ? s0.values : s1.values, i);
    ASSERT_EQ(q.size(), expected.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
      EXPECT_EQ(q[k].first, expected[k].first);
      EXPECT_NEAR(q[k].second, expected[k].second, 1e-8);
    }
    const Move best = view.best_move(s);
    EXPECT_NEAR(view.q_value(s, best), view.value(s, mover), 1e-8);
  }
}

}  // namespace
}  // namespace rpglite
