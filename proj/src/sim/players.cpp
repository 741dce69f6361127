#include "rpglite/sim/players.hpp"

#include <algorithm>
#include <cmath>

#include "rpglite/core/error.hpp"
#include "rpglite/core/timefmt.hpp"

namespace rpglite::sim {

std::pair<int, int> elo_update(int winner, int loser) {
  const double expected = 1.0 / (1.0 + std::pow(10.0, (loser - winner) / 400.0));
  const int delta = static_cast<int>(std::lround(kEloK * (1.0 - expected)));
  return {std::max(0, winner + delta), std::max(0, loser - delta)};
}

MedalRules MedalRules::from_json(const nlohmann::json& j) {
  MedalRules r;
  try {
    r.wins_for_first = j.value("first_win", r.wins_for_first);
    r.wins_for_ten = j.value("ten_wins", r.wins_for_ten);
    r.games_for_hundred = j.value("hundred_games", r.games_for_hundred);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("medal rules: ") + e.what());
  }
  if (r.wins_for_first < 1 || r.wins_for_ten < 1 || r.games_for_hundred < 1) {
    throw Error(ErrorCode::OutOfRange, "medal thresholds must be positive");
  }
  return r;
}

nlohmann::json MedalRules::to_json() const {
  return {{"first_win", wins_for_first}, {"ten_wins", wins_for_ten}, {"hundred_games", games_for_hundred}};
}

nlohmann::json to_json(const PlayerRecord& p) {
  nlohmann::json chars = nlohmann::json::object();
  for (auto c : kAllCharacters) {
    const auto& n = p.characters[index_of(c)];
    chars[std::string(name_of(c))] = {{"played", n.played}, {"won", n.won}};
  }
  return {
      {"username", p.username},
      {"created_at", format_utc_ms(p.created_at_ms)},
      {"skill", p.skill},
      {"games", p.games},
      {"wins", p.wins},
      {"characters", chars},
      {"medals", std::vector<std::string>(p.medals.begin(), p.medals.end())},
      {"losses_to", p.losses_to},
      {"extra", p.extra},
  };
}

PlayerRecord player_record_from_json(const nlohmann::json& j) {
  try {
    PlayerRecord p;
    p.username = j.at("username").get<std::string>();
    p.created_at_ms = parse_utc_ms(j.at("created_at").get<std::string>());
    p.skill = j.at("skill").get<int>();
    p.games = j.at("games").get<int>();
    p.wins = j.at("wins").get<int>();
    for (auto c : kAllCharacters) {
      const auto& n = j.at("characters").at(std::string(name_of(c)));
      p.characters[index_of(c)] = {n.at("played").get<int>(), n.at("won").get<int>()};
      if (p.characters[index_of(c)].won > p.characters[index_of(c)].played) {
        throw Error(ErrorCode::SchemaViolation, p.username + ": won exceeds played");
      }
    }
    for (const auto& m : j.at("medals")) p.medals.insert(m.get<std::string>());
    p.losses_to = j.at("losses_to").get<std::vector<std::string>>();
    p.extra = j.value("extra", nlohmann::json::object());
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("player record: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaViolation) throw;
    throw Error(ErrorCode::SchemaViolation, std::string("player record: ") + e.what());
  }
}

void record_result(PlayerRecord& player, const GameRecord& game, Side side, const GameState& final_state,
                   const Config& config, const MedalRules& rules) {
  if (!game.winner) return;
  const bool won = *game.winner == side;
  ++player.games;
  for (auto id : {game.pairs[side].first, game.pairs[side].second}) {
    auto& n = player.characters[index_of(id)];
    ++n.played;
    if (won) ++n.won;
  }
  if (won) {
    ++player.wins;
  } else {
    player.losses_to.push_back(game.usernames[other(side)]);
  }
  if (player.wins >= rules.wins_for_first) player.medals.insert("first_win");
  if (player.wins >= rules.wins_for_ten) player.medals.insert("ten_wins");
  if (player.games >= rules.games_for_hundred) player.medals.insert("hundred_games");
  if (std::all_of(player.characters.begin(), player.characters.end(), [](const auto& n) { return n.won > 0; })) {
    player.medals.insert("all_characters");
  }
  if (won) {
    bool full = true;
    for (int slot = 0; slot < 2; ++slot) {
      const auto& c = final_state.at(side, slot);
      full = full && c.hp == config.of(c.id).health;
    }
    if (full) player.medals.insert("flawless");
  }
}

}  // namespace rpglite::sim
