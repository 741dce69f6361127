#pragma once

#include <array>
#include <optional>
#include <string>

#include <json.hpp>

#include "rpglite/balance/csg.hpp"

namespace rpglite::balance {

using MatchupMatrix = std::array<std::array<double, kPairCount>, kPairCount>;

struct BalanceReport {
  std::string config_hash;
  std::string season_id;
  double tolerance = solver::kDefaultTolerance;
  // M[i][j]: coin-flip minimax probability that pair i beats pair j.
  MatchupMatrix matrix{};
  std::array<double, kCharacterCount> usage{};
  double matrix_score = 0.0;  // 1 - 2 * RMS(row mean - 0.5)
  double usage_score = 0.0;   // entropy(usage) / log 8
  CsgTrace trace;
};

// Both minimax orientations of every unordered matchup.
MatchupMatrix matchup_matrix(const SpaceSet& spaces, double tol = solver::kDefaultTolerance, unsigned jobs = 1);
double matrix_score(const MatchupMatrix& m);
double usage_score(const std::array<double, kCharacterCount>& usage);

BalanceReport balance_report(const SpaceSet& spaces, const CsgParameters& csg, unsigned jobs = 1);
BalanceReport balance_report(const Config& config, const CsgParameters& csg, unsigned jobs = 1);

struct Comparison {
  BalanceReport a;
  BalanceReport b;
  double matrix_delta = 0.0;  // b - a
  double usage_delta = 0.0;
  // Set only when both deltas are nonzero and point the same way.
  std::optional<std::string> more_balanced;
};

Comparison compare_configs(const Config& a, const Config& b, const CsgParameters& csg, unsigned jobs = 1);

nlohmann::json to_json(const BalanceReport& report);
nlohmann::json to_json(const Comparison& comparison);

}  // namespace rpglite::balance
