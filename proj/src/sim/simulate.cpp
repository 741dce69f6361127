#include "rpglite/sim/simulate.hpp"

namespace rpglite::sim {

GameRecord simulate_game(const Bot& bot0, const Bot& bot1, const Config& config, std::uint64_t seed,
                         const SimulationOptions& options) {
  SplitMix64 coin(derive_seed(seed, 0));
  std::array<SplitMix64, 2> choice{SplitMix64(derive_seed(seed, 1)), SplitMix64(derive_seed(seed, 2))};
  SplitMix64 dice(derive_seed(seed, 3));
  const std::array<const Bot*, 2> bots{&bot0, &bot1};

  GameRecord r;
  r.game_id = options.game_id;
  r.usernames = options.usernames;
  r.season_id = config.season_id;
  r.config_hash = config_hash_hex(config);
  r.pairs = {bot0.choose_pair(choice[0]), bot1.choose_pair(choice[1])};
  r.first_mover = static_cast<Side>(coin.below(2));
  r.started_at_ms = options.start_ms;
  const solver::Matchup matchup{r.pairs[0], r.pairs[1]};

  GameState state = initial_state(r.pairs[0], r.pairs[1], r.first_mover, config);
  std::int64_t clock = options.start_ms;
  while (!winner(state) && static_cast<int>(r.moves.size()) < options.move_cap) {
    const Side side = state.active;
    const Move move = bots[side]->choose_move(state, matchup, choice[side], options.epsilon[side]);
    Branch b = sample_transition(state, move, config, dice);
    clock += options.move_interval_ms;
    MoveRecord m;
    m.side = side;
    m.move = move;
    if (move.kind == MoveKind::Attack) m.actor = state.at(side, move.actor).id;
    m.events = b.events;
    m.after = b.next;
    m.at_ms = clock;
    r.moves.push_back(std::move(m));
    state = b.next;
  }
  r.winner = winner(state);
  r.end_reason = r.winner ? EndReason::Win : EndReason::Cap;
  r.ended_at_ms = clock;
  return r;
}

}  // namespace rpglite::sim
