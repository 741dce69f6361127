#include "rpglite/balance/csg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "rpglite/core/error.hpp"
#include "rpglite/core/parallel.hpp"
#include "rpglite/core/serialize.hpp"
#include "rpglite/core/version.hpp"

namespace rpglite::balance {

using solver::BehavioralPolicy;
using solver::MoveWeight;
using solver::StateSpace;

SpaceSet SpaceSet::build(const Config& config, unsigned jobs, std::size_t budget) {
  SpaceSet set;
  set.config_ = config;
  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (std::size_t i = 0; i < kPairCount; ++i) {
    for (std::size_t j = i; j < kPairCount; ++j) {
      set.slot_[i][j] = set.slot_[j][i] = static_cast<std::uint32_t>(order.size());
      order.emplace_back(i, j);
    }
  }
  set.spaces_.resize(order.size());
  parallel_for(order.size(), jobs, [&](std::size_t k) {
    set.spaces_[k] = StateSpace::enumerate({pair_at(order[k].first), pair_at(order[k].second)}, config, budget);
  });
  return set;
}

std::pair<const StateSpace*, Side> SpaceSet::find(std::size_t a, std::size_t b) const {
  return {&spaces_[slot_[a][b]], a <= b ? Side{0} : Side{1}};
}

std::size_t SpaceSet::total_states() const {
  std::size_t n = 0;
  for (const auto& s : spaces_) n += s.size();
  return n;
}

std::optional<std::uint16_t> KeyedPolicy::find(StateKey key) const {
  auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return std::nullopt;
  return moves[static_cast<std::size_t>(it - keys.begin())];
}

KeyedPolicy KeyedPolicy::from(const StateSpace& space, Side owner, const solver::Policy& policy) {
  std::vector<std::pair<StateKey, std::uint16_t>> rows;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space.terminal(i) || space.mover(i) != owner) continue;
    rows.emplace_back(perspective_key(space.state(i), owner), encode_move(policy.move_at(space, i)));
  }
  std::sort(rows.begin(), rows.end());
  KeyedPolicy out;
  out.keys.reserve(rows.size());
  out.moves.reserve(rows.size());
  for (const auto& [k, m] : rows) {
    // Mirror matchups reach the same perspective state from both sides.
    if (!out.keys.empty() && out.keys.back() == k) continue;
    out.keys.push_back(k);
    out.moves.push_back(m);
  }
  return out;
}

Strategy Strategy::uniform_random() {
  Strategy s;
  s.label = "uniform";
  s.pair_choice.fill(1.0 / double(kPairCount));
  s.uniform_play = true;
  return s;
}

PairDistribution aggregate_pairs(const Metagame& metagame) {
  if (metagame.members.empty()) throw Error(ErrorCode::EmptyMetagame, "metagame has no members");
  PairDistribution out{};
  for (std::size_t m = 0; m < metagame.members.size(); ++m) {
    for (std::size_t p = 0; p < kPairCount; ++p) out[p] += metagame.weights[m] * metagame.members[m]->pair_choice[p];
  }
  return out;
}

std::vector<MoveWeight> aggregate_at(const Metagame& metagame, std::size_t own_pair, std::size_t opp_pair,
                                     StateKey perspective, std::span<const Move> moves) {
  if (metagame.members.empty()) throw Error(ErrorCode::EmptyMetagame, "metagame has no members");
  std::vector<double> mix(moves.size(), 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < metagame.members.size(); ++m) {
    const Strategy& member = *metagame.members[m];
    const double w = metagame.weights[m] * member.pair_choice[own_pair];
    if (w <= 0.0) continue;
    if (member.uniform_play) {
      for (auto& x : mix) x += w / double(moves.size());
      total += w;
      continue;
    }
    auto it = member.policies.find({own_pair, opp_pair});
    if (it == member.policies.end()) continue;
    auto code = it->second.find(perspective);
    if (!code) continue;
    for (std::size_t k = 0; k < moves.size(); ++k) {
      if (encode_move(moves[k]) == *code) {
        mix[k] += w;
        total += w;
        break;
      }
    }
  }
  std::vector<MoveWeight> out;
  if (total <= 0.0) {
    // Nobody in the metagame reaches this matchup: fall back to uniform.
    for (std::size_t k = 0; k < moves.size(); ++k) out.push_back({static_cast<std::uint16_t>(k), 1.0 / double(moves.size())});
    return out;
  }
  for (std::size_t k = 0; k < moves.size(); ++k) {
    if (mix[k] > 0.0) out.push_back({static_cast<std::uint16_t>(k), mix[k] / total});
  }
  return out;
}

BehavioralPolicy aggregate_policy(const Metagame& metagame, const StateSpace& space, Side side) {
  const std::size_t own = pair_index(side == 0 ? space.matchup().pair0 : space.matchup().pair1);
  const std::size_t opp = pair_index(side == 0 ? space.matchup().pair1 : space.matchup().pair0);
  BehavioralPolicy out;
  out.side = side;
  out.begin.reserve(space.size() + 1);
  out.begin.push_back(0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!space.terminal(i) && space.mover(i) == side) {
      auto w = aggregate_at(metagame, own, opp, perspective_key(space.state(i), side), space.moves(i));
      out.entries.insert(out.entries.end(), w.begin(), w.end());
    }
    out.begin.push_back(static_cast<std::uint32_t>(out.entries.size()));
  }
  return out;
}

std::array<double, kCharacterCount> character_frequency(const PairDistribution& pairs) {
  std::array<double, kCharacterCount> out{};
  for (std::size_t p = 0; p < kPairCount; ++p) {
    out[index_of(pair_at(p).first)] += 0.5 * pairs[p];
    out[index_of(pair_at(p).second)] += 0.5 * pairs[p];
  }
  return out;
}

namespace {

// One solved (own pair, opp pair) cell of a step.
struct Cell {
  double value = 0.0;
  const StateSpace* space = nullptr;
  Side side = 0;
  solver::Policy policy;
};

using CellGrid = std::vector<Cell>;  // own * kPairCount + opp

CellGrid solve_cells(const SpaceSet& spaces, unsigned jobs, double tol,
                     const std::function<std::optional<BehavioralPolicy>(const StateSpace&, Side)>& opponent) {
  CellGrid cells(kPairCount * kPairCount);
  parallel_for(spaces.size(), jobs, [&](std::size_t k) {
    const StateSpace& space = spaces.at(k);
    const std::size_t a = pair_index(space.matchup().pair0);
    const std::size_t b = pair_index(space.matchup().pair1);
    for (Side s = 0; s < 2; ++s) {
      if (s == 1 && a == b) break;
      const std::size_t own = s == 0 ? a : b;
      const std::size_t opp = s == 0 ? b : a;
      Cell& cell = cells[own * kPairCount + opp];
      cell.space = &space;
      cell.side = s;
      if (auto policy = opponent(space, other(s))) {
        auto br = solver::best_response(space, *policy, tol);
        cell.value = solver::coin_flip_value(space, br.values);
        cell.policy = std::move(br.policy);
      } else {
        auto mm = solver::solve_minimax(space, tol, s);
        cell.value = solver::coin_flip_value(space, mm.values);
        cell.policy = std::move(mm.policies[s]);
      }
    }
  });
  return cells;
}

}  // namespace

StepResult csg_step(const Metagame& metagame, const SpaceSet& spaces, double tol, unsigned jobs,
                    const std::string& label) {
  const PairDistribution pc = aggregate_pairs(metagame);
  auto cells = solve_cells(spaces, jobs, tol, [&](const StateSpace& space, Side opp_side) -> std::optional<BehavioralPolicy> {
    const auto opp = pair_index(opp_side == 0 ? space.matchup().pair0 : space.matchup().pair1);
    if (pc[opp] <= 0.0) return std::nullopt;
    return aggregate_policy(metagame, space, opp_side);
  });

  StepResult result;
  for (std::size_t p = 0; p < kPairCount; ++p) {
    double score = 0.0;
    for (std::size_t q = 0; q < kPairCount; ++q) score += pc[q] * cells[p * kPairCount + q].value;
    result.pair_scores[p] = score;
  }
  const double best = *std::max_element(result.pair_scores.begin(), result.pair_scores.end());
  for (std::size_t p = 0; p < kPairCount; ++p) {
    if (result.pair_scores[p] >= best - tol) result.argmax.push_back(p);
  }

  auto strategy = std::make_shared<Strategy>();
  strategy->label = label;
  const double share = 1.0 / double(result.argmax.size());
  for (auto p : result.argmax) {
    strategy->pair_choice[p] = share;
    result.value += share * result.pair_scores[p];
    for (std::size_t q = 0; q < kPairCount; ++q) {
      const Cell& cell = cells[p * kPairCount + q];
      strategy->policies[{p, q}] = KeyedPolicy::from(*cell.space, cell.side, cell.policy);
    }
  }
  result.character_frequency = character_frequency(strategy->pair_choice);
  result.strategy = std::move(strategy);
  return result;
}

Strategy minimax_strategy(const SpaceSet& spaces, double tol, unsigned jobs) {
  auto cells = solve_cells(spaces, jobs, tol, [](const StateSpace&, Side) { return std::optional<BehavioralPolicy>{}; });
  Strategy out;
  out.label = "minimax";
  out.pair_choice.fill(1.0 / double(kPairCount));
  for (std::size_t p = 0; p < kPairCount; ++p) {
    for (std::size_t q = 0; q < kPairCount; ++q) {
      const Cell& cell = cells[p * kPairCount + q];
      out.policies[{p, q}] = KeyedPolicy::from(*cell.space, cell.side, cell.policy);
    }
  }
  return out;
}

std::array<double, kCharacterCount> CsgTrace::usage() const {
  std::array<double, kCharacterCount> out{};
  std::size_t n = 0;
  for (const auto& it : iterations) {
    if (it.iteration == 0) continue;
    for (std::size_t c = 0; c < kCharacterCount; ++c) out[c] += it.character_frequency[c];
    ++n;
  }
  if (n == 0) {
    out.fill(1.0 / double(kCharacterCount));
    return out;
  }
  for (auto& x : out) x /= double(n);
  return out;
}

CsgTrace run_csg(const SpaceSet& spaces, const CsgParameters& parameters, unsigned jobs) {
  CsgTrace trace;
  trace.config_hash = config_hash_hex(spaces.config());
  trace.season_id = spaces.config().season_id;
  trace.parameters = parameters;

  Metagame metagame;
  auto seed = std::make_shared<const Strategy>(Strategy::uniform_random());
  metagame.members.push_back(seed);
  metagame.weights.push_back(1.0);

  CsgIteration zero;
  zero.iteration = 0;
  zero.label = seed->label;
  zero.value = std::nan("");
  zero.pair_choice = seed->pair_choice;
  zero.character_frequency = character_frequency(seed->pair_choice);
  trace.iterations.push_back(zero);

  for (int n = 1; n <= parameters.iterations; ++n) {
    auto step = csg_step(metagame, spaces, parameters.tolerance, jobs, "csg-" + std::to_string(n));
    CsgIteration row;
    row.iteration = n;
    row.label = step.strategy->label;
    row.value = step.value;
    row.argmax = step.argmax;
    row.pair_choice = step.strategy->pair_choice;
    row.pair_scores = step.pair_scores;
    row.character_frequency = step.character_frequency;
    trace.iterations.push_back(std::move(row));
    if (step.value <= 0.5 + parameters.epsilon) {
      trace.stopped_early = true;
      break;
    }
    metagame.members.push_back(step.strategy);
    if (parameters.window > 0 && metagame.members.size() > std::size_t(parameters.window)) {
      metagame.members.erase(metagame.members.begin(),
                             metagame.members.end() - static_cast<std::ptrdiff_t>(parameters.window));
    }
    metagame.weights.assign(metagame.members.size(), 1.0 / double(metagame.members.size()));
    metagame.generation = n;
  }
  return trace;
}

CsgTrace run_csg(const Config& config, const CsgParameters& parameters, unsigned jobs) {
  return run_csg(SpaceSet::build(config, jobs), parameters, jobs);
}

namespace {

nlohmann::json pair_map(const PairDistribution& d) {
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t p = 0; p < kPairCount; ++p) out[pair_name(pair_at(p))] = round_sig9(d[p]);
  return out;
}

nlohmann::json character_map(const std::array<double, kCharacterCount>& f) {
  nlohmann::json out = nlohmann::json::object();
  for (auto c : kAllCharacters) out[std::string(name_of(c))] = round_sig9(f[index_of(c)]);
  return out;
}

}  // namespace

nlohmann::json to_json(const CsgTrace& trace) {
  nlohmann::json iterations = nlohmann::json::array();
  for (const auto& it : trace.iterations) {
    nlohmann::json argmax = nlohmann::json::array();
    for (auto p : it.argmax) argmax.push_back(pair_name(pair_at(p)));
    nlohmann::json row = {
        {"iteration", it.iteration},
        {"label", it.label},
        {"value", std::isnan(it.value) ? nlohmann::json(nullptr) : nlohmann::json(round_sig9(it.value))},
        {"argmax", argmax},
        {"pair_choice", pair_map(it.pair_choice)},
        {"character_frequency", character_map(it.character_frequency)},
    };
    if (it.iteration > 0) row["pair_scores"] = pair_map(it.pair_scores);
    iterations.push_back(std::move(row));
  }
  return {
      {"kind", "csg_trace"},
      {"tool", kToolName},
      {"version", kVersion},
      {"config_hash", trace.config_hash},
      {"season_id", trace.season_id},
      {"parameters",
       {{"iterations", trace.parameters.iterations},
        {"epsilon", trace.parameters.epsilon},
        {"window", trace.parameters.window},
        {"tolerance", trace.parameters.tolerance}}},
      {"iterations", iterations},
      {"stopped_early", trace.stopped_early},
      {"usage", character_map(trace.usage())},
  };
}

}  // namespace rpglite::balance
