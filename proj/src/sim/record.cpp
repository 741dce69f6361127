#include "rpglite/sim/record.hpp"

#include "rpglite/core/error.hpp"
#include "rpglite/core/serialize.hpp"
#include "rpglite/core/timefmt.hpp"

namespace rpglite::sim {

std::string to_string(EndReason reason) {
  switch (reason) {
    case EndReason::Win: return "win";
    case EndReason::Forfeit: return "forfeit";
    case EndReason::Cap: return "cap";
    case EndReason::Open: return "open";
  }
  return "open";
}

EndReason parse_end_reason(const std::string& text) {
  if (text == "win") return EndReason::Win;
  if (text == "forfeit") return EndReason::Forfeit;
  if (text == "cap") return EndReason::Cap;
  if (text == "open") return EndReason::Open;
  throw Error(ErrorCode::SchemaViolation, "unknown end_reason '" + text + "'");
}

nlohmann::json to_json(const GameRecord& r) {
  nlohmann::json moves = nlohmann::json::array();
  for (const auto& m : r.moves) {
    moves.push_back({
        {"side", m.side},
        {"actor", m.actor ? nlohmann::json(std::string(name_of(*m.actor))) : nlohmann::json(nullptr)},
        {"move", to_json(m.move)},
        {"events", to_json(m.events)},
        {"after", to_json(m.after)},
        {"at", format_utc_ms(m.at_ms)},
    });
  }
  return {
      {"game_id", r.game_id},
      {"usernames", {r.usernames[0], r.usernames[1]}},
      {"season_id", r.season_id},
      {"config_hash", r.config_hash},
      {"pairs", nlohmann::json::array({to_json(r.pairs[0]), to_json(r.pairs[1])})},
      {"first_mover", r.first_mover},
      {"moves", moves},
      {"winner", r.winner ? nlohmann::json(*r.winner) : nlohmann::json(nullptr)},
      {"end_reason", to_string(r.end_reason)},
      {"started_at", format_utc_ms(r.started_at_ms)},
      {"ended_at", format_utc_ms(r.ended_at_ms)},
  };
}

namespace {

Side side_from(const nlohmann::json& j) {
  const int v = j.get<int>();
  if (v != 0 && v != 1) throw Error(ErrorCode::SchemaViolation, "side must be 0 or 1");
  return static_cast<Side>(v);
}

}  // namespace

GameRecord game_record_from_json(const nlohmann::json& j) {
  try {
    GameRecord r;
    r.game_id = j.at("game_id").get<std::string>();
    r.usernames = {j.at("usernames").at(0).get<std::string>(), j.at("usernames").at(1).get<std::string>()};
    r.season_id = j.at("season_id").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.pairs = {pair_from_json(j.at("pairs").at(0)), pair_from_json(j.at("pairs").at(1))};
    r.first_mover = side_from(j.at("first_mover"));
    for (const auto& m : j.at("moves")) {
      MoveRecord mr;
      mr.side = side_from(m.at("side"));
      mr.move = move_from_json(m.at("move"));
      if (!m.at("actor").is_null()) {
        auto id = parse_character(m.at("actor").get<std::string>());
        if (!id) throw Error(ErrorCode::SchemaViolation, "unknown actor");
        mr.actor = *id;
      }
      mr.events = events_from_json(m.at("events"));
      mr.after = game_state_from_json(m.at("after"));
      mr.at_ms = parse_utc_ms(m.at("at").get<std::string>());
      r.moves.push_back(std::move(mr));
    }
    if (!j.at("winner").is_null()) r.winner = side_from(j.at("winner"));
    r.end_reason = parse_end_reason(j.at("end_reason").get<std::string>());
    r.started_at_ms = parse_utc_ms(j.at("started_at").get<std::string>());
    r.ended_at_ms = parse_utc_ms(j.at("ended_at").get<std::string>());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("game record: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaViolation) throw;
    throw Error(ErrorCode::SchemaViolation, std::string("game record: ") + e.what());
  }
}

std::vector<GameState> replay(const GameRecord& r, const Config& config) {
  auto mismatch = [&](std::size_t i, const std::string& why) {
    return Error(ErrorCode::ReplayMismatch, r.game_id + " move " + std::to_string(i) + ": " + why);
  };
  std::vector<GameState> states;
  GameState state = initial_state(r.pairs[0], r.pairs[1], r.first_mover, config);
  for (std::size_t i = 0; i < r.moves.size(); ++i) {
    const auto& m = r.moves[i];
    states.push_back(state);
    if (winner(state)) throw mismatch(i, "move after the game ended");
    GameState next;
    if (m.move.kind == MoveKind::Forfeit) {
      if (m.events != Events{}) throw mismatch(i, "forfeit with outcomes");
      next = forfeit_state(state, m.side);
    } else {
      if (m.side != state.active) throw mismatch(i, "side " + std::to_string(m.side) + " moved out of turn");
      TransitionDistribution dist;
      try {
        dist = transition_distribution(state, m.move, config);
      } catch (const Error& e) {
        throw mismatch(i, e.what());
      }
      const std::optional<CharacterId> actor =
          m.move.kind == MoveKind::Attack ? std::optional(state.at(m.side, m.move.actor).id) : std::nullopt;
      if (actor != m.actor) throw mismatch(i, "actor does not match the acting slot");
      const Branch* found = nullptr;
      for (const auto& b : dist) {
        if (b.events == m.events && b.next == m.after) found = &b;
      }
      if (!found) throw mismatch(i, "recorded outcome is not a branch of " + describe(m.move));
      next = found->next;
    }
    if (!(next == m.after)) throw mismatch(i, "snapshot differs from the replayed state");
    state = next;
  }
  states.push_back(state);

  const auto w = winner(state);
  const bool last_forfeit = !r.moves.empty() && r.moves.back().move.kind == MoveKind::Forfeit;
  switch (r.end_reason) {
    case EndReason::Win:
      if (!w || last_forfeit) throw mismatch(r.moves.size(), "end reason win without a decided board");
      break;
    case EndReason::Forfeit:
      if (!w || !last_forfeit) throw mismatch(r.moves.size(), "end reason forfeit without a forfeit");
      break;
    case EndReason::Cap:
    case EndReason::Open:
      if (w) throw mismatch(r.moves.size(), "game is decided but recorded as " + to_string(r.end_reason));
      break;
  }
  if (w != r.winner) throw mismatch(r.moves.size(), "recorded winner differs");
  return states;
}

}  // namespace rpglite::sim
