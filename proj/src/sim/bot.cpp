#include "rpglite/sim/bot.hpp"

#include <cmath>
#include <sstream>

#include "rpglite/core/error.hpp"

namespace rpglite::sim {

namespace {

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad " + what + " '" + text + "'");
  }
}

std::string number_text(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

BotSpec parse_bot_spec(const std::string& text) {
  BotSpec spec;
  std::string body = text;
  if (auto at = text.find('@'); at != std::string::npos) {
    body = text.substr(0, at);
    const std::string pair = text.substr(at + 1);
    if (pair == "argmax") {
      spec.pair_policy = PairPolicy::Argmax;
    } else if (pair == "uniform") {
      spec.pair_policy = PairPolicy::Uniform;
    } else {
      spec.pair_policy = PairPolicy::Fixed;
      spec.pair = parse_pair(pair);
    }
  }
  std::string kind = body, param;
  if (auto colon = body.find(':'); colon != std::string::npos) {
    kind = body.substr(0, colon);
    param = body.substr(colon + 1);
  }
  if (kind == "optimal") {
    spec.kind = BotKind::Optimal;
  } else if (kind == "epsilon") {
    spec.kind = BotKind::EpsilonGreedy;
    if (param.empty()) throw Error(ErrorCode::ParseError, "epsilon bot needs a parameter: " + text);
    if (auto tilde = param.find('~'); tilde != std::string::npos) {
      spec.epsilon = parse_number(param.substr(0, tilde), "epsilon");
      spec.epsilon_end = parse_number(param.substr(tilde + 1), "epsilon");
    } else {
      spec.epsilon = parse_number(param, "epsilon");
    }
  } else if (kind == "softmax") {
    spec.kind = BotKind::Softmax;
    if (param.empty()) throw Error(ErrorCode::ParseError, "softmax bot needs a temperature: " + text);
    spec.tau = parse_number(param, "temperature");
  } else if (kind == "uniform") {
    spec.kind = BotKind::UniformRandom;
  } else if (kind == "skip") {
    spec.kind = BotKind::AlwaysSkip;
  } else {
    throw Error(ErrorCode::ParseError, "unknown bot kind '" + kind + "'");
  }
  if (!param.empty() && (spec.kind != BotKind::EpsilonGreedy && spec.kind != BotKind::Softmax)) {
    throw Error(ErrorCode::ParseError, "bot kind '" + kind + "' takes no parameter");
  }
  return spec;
}

std::string to_string(const BotSpec& spec) {
  std::string out;
  switch (spec.kind) {
    case BotKind::Optimal: out = "optimal"; break;
    case BotKind::EpsilonGreedy:
      out = "epsilon:" + number_text(spec.epsilon);
      if (spec.epsilon_end) out += "~" + number_text(*spec.epsilon_end);
      break;
    case BotKind::Softmax: out = "softmax:" + number_text(spec.tau); break;
    case BotKind::UniformRandom: out = "uniform"; break;
    case BotKind::AlwaysSkip: out = "skip"; break;
  }
  switch (spec.pair_policy) {
    case PairPolicy::Fixed: out += "@" + pair_name(*spec.pair); break;
    case PairPolicy::Argmax: out += "@argmax"; break;
    case PairPolicy::Uniform: break;
  }
  return out;
}

bool needs_values(const BotSpec& spec) {
  return spec.kind == BotKind::Optimal || spec.kind == BotKind::EpsilonGreedy || spec.kind == BotKind::Softmax;
}

Bot::Bot(BotSpec spec, Config config, solver::ArtifactStore* store)
    : spec_(std::move(spec)), config_(std::move(config)), store_(store) {
  if (spec_.pair_policy == PairPolicy::Argmax) argmax_pair_ = argmax_pair(config_, *store_);
}

Pair Bot::choose_pair(SplitMix64& rng) const {
  switch (spec_.pair_policy) {
    case PairPolicy::Fixed: return *spec_.pair;
    case PairPolicy::Argmax: return *argmax_pair_;
    case PairPolicy::Uniform: break;
  }
  return pair_at(rng.below(kPairCount));
}

Move Bot::choose_move(const GameState& state, const solver::Matchup& matchup, SplitMix64& rng,
                      std::optional<double> epsilon) const {
  const auto moves = legal_moves(state, config_, MoveSet::NoForfeit);
  switch (spec_.kind) {
    case BotKind::AlwaysSkip:
      for (const auto& m : moves) {
        if (m.kind == MoveKind::Skip) return m;
      }
      return moves.front();
    case BotKind::UniformRandom: return moves[rng.below(moves.size())];
    case BotKind::Optimal: return store_->get(config_, matchup).best_move(state);
    case BotKind::EpsilonGreedy: {
      const double eps = epsilon.value_or(spec_.epsilon);
      if (rng.uniform() < eps) return moves[rng.below(moves.size())];
      return store_->get(config_, matchup).best_move(state);
    }
    case BotKind::Softmax: {
      auto q = store_->get(config_, matchup).q_values(state);
      double top = q.front().second;
      for (const auto& [m, v] : q) top = std::max(top, v);
      std::vector<double> w(q.size());
      double total = 0.0;
      for (std::size_t k = 0; k < q.size(); ++k) total += w[k] = std::exp((q[k].second - top) / spec_.tau);
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t k = 0; k < q.size(); ++k) {
        acc += w[k];
        if (u < acc) return q[k].first;
      }
      return q.back().first;
    }
  }
  return moves.front();
}

Pair argmax_pair(const Config& config, solver::ArtifactStore& store) {
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t p = 0; p < kPairCount; ++p) {
    double score = 0.0;
    for (std::size_t q = 0; q < kPairCount; ++q) {
      auto values = store.get(config, {pair_at(p), pair_at(q)});
      for (Side first = 0; first < 2; ++first) {
        score += 0.5 * values.value(initial_state(pair_at(p), pair_at(q), first, config), 0);
      }
    }
    if (score > best_score + 1e-12) {
      best = p;
      best_score = score;
    }
  }
  return pair_at(best);
}

Bot make_bot(const BotSpec& spec, const Config& config, solver::ArtifactStore* store, bool solve_missing) {
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (spec.kind == BotKind::EpsilonGreedy && (!in_unit(spec.epsilon) || (spec.epsilon_end && !in_unit(*spec.epsilon_end)))) {
    throw Error(ErrorCode::OutOfRange, "epsilon must lie in [0, 1]");
  }
  if (spec.kind == BotKind::Softmax && !(std::isfinite(spec.tau) && spec.tau > 0.0)) {
    throw Error(ErrorCode::OutOfRange, "softmax temperature must be positive");
  }
  if (spec.pair_policy == PairPolicy::Fixed && !spec.pair) throw Error(ErrorCode::OutOfRange, "fixed pair missing");
  const bool values = needs_values(spec) || spec.pair_policy == PairPolicy::Argmax;
  if (values) {
    if (!store) throw Error(ErrorCode::MissingArtifact, "bot " + to_string(spec) + " needs solved artifacts");
    for (std::size_t p = 0; p < kPairCount; ++p) {
      if (spec.pair_policy == PairPolicy::Fixed && pair_at(p) != *spec.pair) {
        continue;
      }
      for (std::size_t q = 0; q < kPairCount; ++q) {
        const solver::Matchup m{pair_at(p), pair_at(q)};
        if (solve_missing) {
          store->ensure(config, m);
        } else {
          store->get(config, m);
        }
      }
    }
  }
  return Bot(spec, config, store);
}

}  // namespace rpglite::sim
