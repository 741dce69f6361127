#include "rpglite/core/rules.hpp"

#include <algorithm>
#include <string>

#include "rpglite/core/error.hpp"

namespace rpglite {

namespace {

void end_turn(GameState& s) {
  for (auto& c : s.sides[s.active]) c.stunned = false;
  s.chain = -1;
  s.active = other(s.active);
  ++s.turn_count;
}

bool damaged_and_alive(const CharacterState& c, const Config& config) {
  return c.alive() && c.hp < config.of(c.id).health;
}

// Applies one roll of `actor` against opposing slot `target` in place.
Roll resolve_roll(GameState& s, const CharacterState& actor, int target, bool hit, const Config& config) {
  Side foe = other(s.active);
  auto& victim = s.at(foe, target);
  const auto& stats = config.of(actor.id);
  Roll roll;
  roll.target = static_cast<std::uint8_t>(target);
  roll.hit = hit;

  int amount = 0;
  if (hit) {
    amount = stats.damage;
    if (actor.id == CharacterId::Barbarian && actor.hp <= config.rage_threshold) {
      amount = config.rage_damage;
      roll.rage = true;
    }
    if (actor.id == CharacterId::Rogue && victim.hp <= config.execute_range) {
      amount = victim.hp;
      roll.execute = true;
    }
  } else if (actor.id == CharacterId::Gunner && config.graze > 0) {
    amount = config.graze;
    roll.graze = true;
  }
  amount = std::min<int>(amount, victim.hp);
  victim.hp = static_cast<std::uint8_t>(victim.hp - amount);
  if (!victim.alive()) victim.stunned = false;
  roll.damage = static_cast<std::uint8_t>(amount);
  return roll;
}

void append_merged(TransitionDistribution& out, Branch branch) {
  for (auto& b : out) {
    if (b.next == branch.next) {
      b.probability += branch.probability;
      return;
    }
  }
  out.push_back(std::move(branch));
}

TransitionDistribution attack_distribution(const GameState& state, const Move& move, const Config& config) {
  const Side me = state.active;
  const CharacterState actor = state.at(me, move.actor);
  const double accuracy = config.of(actor.id).accuracy;

  std::array<int, 2> targets{move.target, move.second_target};
  const int n = move.second_target >= 0 ? 2 : 1;

  TransitionDistribution out;
  out.reserve(static_cast<std::size_t>(1) << n);
  // Hits before misses, first target's roll most significant.
  for (int mask = (1 << n) - 1; mask >= 0; --mask) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      bool hit = ((mask >> (n - 1 - i)) & 1) != 0;
      p *= hit ? accuracy : 1.0 - accuracy;
    }
    if (p <= 0.0) continue;

    Branch b;
    b.probability = p;
    b.next = state;
    bool any_hit = false;
    for (int i = 0; i < n; ++i) {
      bool hit = ((mask >> (n - 1 - i)) & 1) != 0;
      any_hit = any_hit || hit;
      b.events.rolls[static_cast<std::size_t>(i)] = resolve_roll(b.next, actor, targets[static_cast<std::size_t>(i)], hit, config);
    }
    b.events.roll_count = static_cast<std::uint8_t>(n);

    if (any_hit && actor.id == CharacterId::Healer && move.heal_target >= 0) {
      auto& ally = b.next.at(me, move.heal_target);
      int cap = config.of(ally.id).health;
      int healed = std::min(cap, ally.hp + config.heal) - ally.hp;
      ally.hp = static_cast<std::uint8_t>(ally.hp + healed);
      b.events.heal_target = move.heal_target;
      b.events.heal_amount = static_cast<std::uint8_t>(healed);
    }
    if (any_hit && actor.id == CharacterId::Wizard) {
      auto& victim = b.next.at(other(me), move.target);
      if (victim.alive()) {
        victim.stunned = true;
        b.events.stun_target = move.target;
      }
    }
    if (any_hit && actor.id == CharacterId::Monk && b.next.side_alive(other(me))) {
      b.next.chain = static_cast<std::int8_t>(move.actor);
      b.events.chain = true;
    } else {
      end_turn(b.next);
    }
    append_merged(out, std::move(b));
  }
  return out;
}

}  // namespace

GameState initial_state(Pair pair0, Pair pair1, Side first_mover, const Config& config) {
  if (pair0.first == pair0.second) throw Error(ErrorCode::DuplicateCharacter, "side 0");
  if (pair1.first == pair1.second) throw Error(ErrorCode::DuplicateCharacter, "side 1");
  if (first_mover > 1) throw Error(ErrorCode::OutOfRange, "first_mover must be 0 or 1");
  GameState s;
  const std::array<Pair, 2> pairs{pair0, pair1};
  for (Side side = 0; side < 2; ++side) {
    const std::array<CharacterId, 2> ids{pairs[side].first, pairs[side].second};
    for (int slot = 0; slot < 2; ++slot) {
      auto& c = s.at(side, slot);
      c.id = ids[static_cast<std::size_t>(slot)];
      c.hp = static_cast<std::uint8_t>(config.of(c.id).health);
      c.stunned = false;
    }
  }
  s.active = first_mover;
  return s;
}

GameState initial_state(CharacterId a0, CharacterId b0, CharacterId a1, CharacterId b1, Side first_mover,
                        const Config& config) {
  return initial_state(Pair::of(a0, b0), Pair::of(a1, b1), first_mover, config);
}

std::optional<Side> winner(const GameState& s) {
  if (s.forfeited >= 0) return other(static_cast<Side>(s.forfeited));
  if (!s.side_alive(1)) return Side{0};
  if (!s.side_alive(0)) return Side{1};
  return std::nullopt;
}

std::vector<Move> legal_moves(const GameState& s, const Config& config, MoveSet set) {
  if (winner(s)) throw Error(ErrorCode::GameOver, "no moves in a terminal state");
  const Side me = s.active;
  const Side foe = other(me);
  std::vector<Move> moves;
  moves.reserve(10);

  auto add_actor = [&](int slot) {
    const auto& actor = s.at(me, slot);
    for (int t = 0; t < 2; ++t) {
      if (!s.at(foe, t).alive()) continue;
      if (actor.id == CharacterId::Healer) {
        bool any = false;
        for (int h = 0; h < 2; ++h) {
          if (damaged_and_alive(s.at(me, h), config)) {
            moves.push_back(Move::attack(slot, t, -1, h));
            any = true;
          }
        }
        if (!any) moves.push_back(Move::attack(slot, t));
      } else {
        moves.push_back(Move::attack(slot, t));
      }
    }
    if (actor.id == CharacterId::Archer && s.at(foe, 0).alive() && s.at(foe, 1).alive()) {
      moves.push_back(Move::attack(slot, 0, 1));
    }
  };

  if (s.in_chain()) {
    add_actor(s.chain);
    return moves;
  }
  for (int slot = 0; slot < 2; ++slot) {
    const auto& actor = s.at(me, slot);
    if (actor.alive() && !actor.stunned) add_actor(slot);
  }
  moves.push_back(Move::skip());
  if (set == MoveSet::Full) moves.push_back(Move::forfeit());
  return moves;
}

bool is_legal(const GameState& state, const Move& move, const Config& config) {
  if (winner(state)) return false;
  auto moves = legal_moves(state, config);
  return std::find(moves.begin(), moves.end(), move) != moves.end();
}

TransitionDistribution transition_distribution_unchecked(const GameState& state, const Move& move,
                                                         const Config& config) {
  switch (move.kind) {
    case MoveKind::Skip: {
      Branch b{1.0, state, {}};
      end_turn(b.next);
      return {b};
    }
    case MoveKind::Forfeit: {
      Branch b{1.0, state, {}};
      b.next.forfeited = static_cast<std::int8_t>(state.active);
      b.next.chain = -1;
      return {b};
    }
    case MoveKind::Attack: break;
  }
  return attack_distribution(state, move, config);
}

TransitionDistribution transition_distribution(const GameState& state, const Move& move, const Config& config) {
  if (winner(state)) throw Error(ErrorCode::IllegalMove, "game is over");
  if (!is_legal(state, move, config)) throw Error(ErrorCode::IllegalMove, describe(move));
  return transition_distribution_unchecked(state, move, config);
}

GameState forfeit_state(const GameState& state, Side side) {
  if (winner(state)) throw Error(ErrorCode::GameOver, "game is already over");
  GameState next = state;
  next.forfeited = static_cast<std::int8_t>(side);
  next.chain = -1;
  return next;
}

Branch sample_transition(const GameState& state, const Move& move, const Config& config, SplitMix64& rng) {
  auto dist = transition_distribution(state, move, config);
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (auto& b : dist) {
    cumulative += b.probability;
    if (u < cumulative) return std::move(b);
  }
  return std::move(dist.back());
}

}  // namespace rpglite
