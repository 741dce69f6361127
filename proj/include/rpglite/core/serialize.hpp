#pragma once

#include <string>

#include <json.hpp>

#include "rpglite/core/config.hpp"
#include "rpglite/core/move.hpp"
#include "rpglite/core/rules.hpp"
#include "rpglite/core/state.hpp"

// Canonical JSON encodings shared by the service wire format and dataset
// files. Objects are emitted with keys in lexicographic order.
//
//   GameState: {"active":0,"chain":null,"forfeited":null,"sides":[[C,C],[C,C]],"turn":3}
//     C = {"hp":12,"id":"knight","stunned":false}
//   Move:      {"kind":"attack","actor":0,"targets":[1],"heal":null}
//              {"kind":"skip"} / {"kind":"forfeit"}
//   Events:    {"chain":false,"heal":null|{"amount":2,"target":0},
//               "rolls":[{"damage":3,"execute":false,"graze":false,"hit":true,"rage":false,"target":1}],
//               "stun":null|1}
namespace rpglite {

nlohmann::json to_json(const GameState& state);
GameState game_state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Move& move);
Move move_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Events& events);
Events events_from_json(const nlohmann::json& j);

nlohmann::json to_json(Pair pair);
Pair pair_from_json(const nlohmann::json& j);

// Config decoding is validate_config (config.hpp).

// Rounds to 9 significant digits so emitted files pin their float text.
double round_sig9(double value);

}  // namespace rpglite
