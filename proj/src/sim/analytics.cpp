#include "rpglite/sim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rpglite/core/error.hpp"
#include "rpglite/core/serialize.hpp"
#include "rpglite/core/timefmt.hpp"

namespace rpglite::sim {

std::vector<MoveCost> move_costs(const GameRecord& game, const Config& config, solver::ArtifactStore& store) {
  const auto states = replay(game, config);
  const auto values = store.get(config, {game.pairs[0], game.pairs[1]});
  std::vector<MoveCost> out;
  out.reserve(game.moves.size());
  for (std::size_t i = 0; i < game.moves.size(); ++i) {
    const auto& m = game.moves[i];
    const GameState& s = states[i];
    MoveCost c;
    c.index = i;
    c.side = m.side;
    c.username = game.usernames[m.side];
    c.move = m.move;
    c.value = values.value(s, m.side);
    if (m.side == s.active) {
      const auto q = values.q_values(s);
      c.q_best = q.front().second;
      for (const auto& [mv, v] : q) c.q_best = std::max(c.q_best, v);
      c.q_move = values.q_value(s, m.move);
    } else {
      // Only a forfeit can come from the side not on turn.
      c.q_best = c.value;
      c.q_move = 0.0;
    }
    c.kappa = std::max(0.0, c.q_best - c.q_move);
    out.push_back(c);
  }
  return out;
}

LearningCurve learning_curve(const std::vector<double>& game_means, int window) {
  if (window < 1) throw Error(ErrorCode::OutOfRange, "window must be at least 1");
  LearningCurve lc;
  lc.means = game_means;
  const std::size_t n = game_means.size();
  double run = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    run += game_means[i];
    if (i >= std::size_t(window)) run -= game_means[i - window];
    lc.moving_average.push_back(run / double(std::min<std::size_t>(i + 1, window)));
  }
  if (n >= 2) {
    const double xbar = double(n - 1) / 2.0;
    double ybar = 0.0;
    for (double y : game_means) ybar += y;
    ybar /= double(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (double(i) - xbar) * (game_means[i] - ybar);
      sxx += (double(i) - xbar) * (double(i) - xbar);
    }
    lc.slope = sxy / sxx;
  }
  return lc;
}

std::map<std::string, LearningCurve> player_learning(const Dataset& dataset, solver::ArtifactStore& store,
                                                     int window) {
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<double>>> per_player;
  for (const auto& p : dataset.players) per_player[p.username];
  for (const auto& g : dataset.games) {
    const auto costs = move_costs(g, dataset.config_for(g), store);
    for (Side side = 0; side < 2; ++side) {
      auto it = per_player.find(g.usernames[side]);
      if (it == per_player.end()) continue;
      double sum = 0.0;
      int n = 0;
      for (const auto& c : costs) {
        if (c.side != side) continue;
        sum += c.kappa;
        ++n;
      }
      if (n == 0) continue;
      it->second.first.push_back(g.game_id);
      it->second.second.push_back(sum / n);
    }
  }
  std::map<std::string, LearningCurve> out;
  for (auto& [name, data] : per_player) {
    auto lc = learning_curve(data.second, window);
    lc.game_ids = std::move(data.first);
    out.emplace(name, std::move(lc));
  }
  return out;
}

DatasetStats dataset_stats(const Dataset& d) {
  DatasetStats s;
  s.users = d.players.size();
  for (const auto& p : d.players) {
    ++s.acquisition[utc_date(p.created_at_ms)];
    s.games_per_user[p.username] = {0, 0};
  }
  for (const auto& g : d.games) {
    switch (g.end_reason) {
      case EndReason::Win: ++s.completed_games; break;
      case EndReason::Forfeit: ++s.completed_games, ++s.forfeits; break;
      case EndReason::Cap: ++s.capped_games; break;
      case EndReason::Open: break;
    }
    if (!g.completed()) continue;
    for (Side side = 0; side < 2; ++side) {
      if (auto it = s.games_per_user.find(g.usernames[side]); it != s.games_per_user.end()) {
        ++it->second.first;
        if (g.end_reason != EndReason::Forfeit) ++it->second.second;
      }
      for (auto id : {g.pairs[side].first, g.pairs[side].second}) {
        auto& c = s.characters[index_of(id)];
        ++c.picks;
        if (g.winner == side) ++c.wins;
      }
    }
  }
  int top = 0;
  for (const auto& [u, n] : s.games_per_user) top = std::max(top, n.first);
  s.retention_inclusive.assign(top + 1, 0);
  s.retention_exclusive.assign(top + 1, 0);
  for (const auto& [u, n] : s.games_per_user) {
    for (int k = 0; k <= n.first; ++k) ++s.retention_inclusive[k];
    for (int k = 0; k <= n.second; ++k) ++s.retention_exclusive[k];
  }
  return s;
}

namespace {

double rate(int num, int den) { return den == 0 ? 0.0 : double(num) / double(den); }

}  // namespace

nlohmann::json to_json(const DatasetStats& s) {
  nlohmann::json chars = nlohmann::json::object();
  const int games = s.completed_games;
  for (auto c : kAllCharacters) {
    const auto& n = s.characters[index_of(c)];
    chars[std::string(name_of(c))] = {
        {"picks", n.picks},
        {"wins", n.wins},
        // Two sides pick two characters each, so pick rates sum to 2.
        {"pick_rate", round_sig9(rate(n.picks, 2 * games))},
        {"win_rate", n.picks ? nlohmann::json(round_sig9(rate(n.wins, n.picks))) : nlohmann::json(nullptr)},
    };
  }
  nlohmann::json users = nlohmann::json::object();
  for (const auto& [u, n] : s.games_per_user) users[u] = {{"inclusive", n.first}, {"exclusive", n.second}};
  return {
      {"users", s.users},
      {"acquisition", s.acquisition},
      {"retention", {{"inclusive", s.retention_inclusive}, {"exclusive", s.retention_exclusive}}},
      {"games_per_user", users},
      {"characters", chars},
      {"completed_games", s.completed_games},
      {"capped_games", s.capped_games},
      {"forfeits", s.forfeits},
  };
}

std::map<std::string, std::string> to_csv(const DatasetStats& s) {
  std::map<std::string, std::string> out;
  {
    std::ostringstream f;
    f << "date,new_users\n";
    for (const auto& [day, n] : s.acquisition) f << day << ',' << n << '\n';
    out["acquisition"] = f.str();
  }
  {
    std::ostringstream f;
    f << "k,inclusive,exclusive\n";
    for (std::size_t k = 0; k < s.retention_inclusive.size(); ++k) {
      f << k << ',' << s.retention_inclusive[k] << ',' << (k < s.retention_exclusive.size() ? s.retention_exclusive[k] : 0)
        << '\n';
    }
    out["retention"] = f.str();
  }
  {
    std::ostringstream f;
    f.precision(9);
    f << "character,picks,wins,pick_rate,win_rate\n";
    for (auto c : kAllCharacters) {
      const auto& n = s.characters[index_of(c)];
      f << name_of(c) << ',' << n.picks << ',' << n.wins << ',' << rate(n.picks, 2 * s.completed_games) << ',';
      if (n.picks) f << rate(n.wins, n.picks);
      f << '\n';
    }
    out["characters"] = f.str();
  }
  {
    std::ostringstream f;
    f << "username,games_inclusive,games_exclusive\n";
    for (const auto& [u, n] : s.games_per_user) f << u << ',' << n.first << ',' << n.second << '\n';
    out["users"] = f.str();
  }
  return out;
}

nlohmann::json to_json(const MoveCost& c) {
  return {
      {"index", c.index},
      {"side", c.side},
      {"username", c.username},
      {"move", to_json(c.move)},
      {"value", round_sig9(c.value)},
      {"q_move", round_sig9(c.q_move)},
      {"q_best", round_sig9(c.q_best)},
      {"kappa", round_sig9(c.kappa)},
  };
}

nlohmann::json to_json(const LearningCurve& lc) {
  nlohmann::json means = nlohmann::json::array(), ma = nlohmann::json::array();
  for (double v : lc.means) means.push_back(round_sig9(v));
  for (double v : lc.moving_average) ma.push_back(round_sig9(v));
  return {
      {"games", lc.game_ids},
      {"mean_kappa", means},
      {"moving_average", ma},
      {"slope", lc.slope ? nlohmann::json(round_sig9(*lc.slope)) : nlohmann::json(nullptr)},
  };
}

}  // namespace rpglite::sim
