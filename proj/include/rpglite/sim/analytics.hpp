#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpglite/sim/dataset.hpp"
#include "rpglite/solver/artifact.hpp"

namespace rpglite::sim {

struct MoveCost {
  std::size_t index = 0;  // position in the move log
  Side side = 0;
  std::string username;
  Move move;
  double value = 0.0;   // V*(s) for the mover
  double q_best = 0.0;  // max_b Q*(s, b); V*(s) for an out-of-turn forfeit
  double q_move = 0.0;  // Q*(s, a); 0 for Forfeit
  double kappa = 0.0;   // q_best - q_move
};

// Replays the game (Error(ReplayMismatch) on inconsistency) and scores every
// recorded move against the minimax values of the game's matchup.
// Error(MissingArtifact) when the values are unavailable.
std::vector<MoveCost> move_costs(const GameRecord& game, const Config& config, solver::ArtifactStore& store);

struct LearningCurve {
  std::vector<std::string> game_ids;
  std::vector<double> means;           // per-game mean kappa
  std::vector<double> moving_average;  // trailing window, shorter at the start
  std::optional<double> slope;         // least squares over game index; null below two games
};

LearningCurve learning_curve(const std::vector<double>& game_means, int window = 5);

// Per dataset player, their games in chronological order (games in which they
// made no move are skipped).
std::map<std::string, LearningCurve> player_learning(const Dataset& dataset, solver::ArtifactStore& store,
                                                     int window = 5);

struct CharacterStats {
  int picks = 0;
  int wins = 0;
};

struct DatasetStats {
  std::size_t users = 0;
  std::map<std::string, int> acquisition;  // "YYYY-MM-DD" -> new users
  // r(k) = users with at least k completed games, k = 0..max; inclusive counts
  // forfeits as completed, exclusive does not.
  std::vector<int> retention_inclusive;
  std::vector<int> retention_exclusive;
  std::map<std::string, std::pair<int, int>> games_per_user;  // inclusive, exclusive
  std::array<CharacterStats, kCharacterCount> characters{};
  int completed_games = 0;
  int capped_games = 0;
  int forfeits = 0;
};

DatasetStats dataset_stats(const Dataset& dataset);
nlohmann::json to_json(const DatasetStats& stats);
// CSV tables keyed by file stem: acquisition, retention, characters, users.
std::map<std::string, std::string> to_csv(const DatasetStats& stats);

nlohmann::json to_json(const MoveCost& cost);
nlohmann::json to_json(const LearningCurve& curve);

}  // namespace rpglite::sim
