#include "rpglite/balance/report.hpp"

#include <cmath>

#include "rpglite/core/parallel.hpp"
#include "rpglite/core/serialize.hpp"
#include "rpglite/core/version.hpp"

namespace rpglite::balance {

MatchupMatrix matchup_matrix(const SpaceSet& spaces, double tol, unsigned jobs) {
  MatchupMatrix m{};
  parallel_for(spaces.size(), jobs, [&](std::size_t k) {
    const auto& space = spaces.at(k);
    const auto a = pair_index(space.matchup().pair0);
    const auto b = pair_index(space.matchup().pair1);
    auto s0 = solver::solve_minimax(space, tol, 0);
    m[a][b] = solver::coin_flip_value(space, s0.values);
    if (a != b) {
      auto s1 = solver::solve_minimax(space, tol, 1);
      m[b][a] = solver::coin_flip_value(space, s1.values);
    }
  });
  return m;
}

double matrix_score(const MatchupMatrix& m) {
  double sum = 0.0;
  for (const auto& row : m) {
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= double(kPairCount);
    sum += (mean - 0.5) * (mean - 0.5);
  }
  return 1.0 - 2.0 * std::sqrt(sum / double(kPairCount));
}

double usage_score(const std::array<double, kCharacterCount>& usage) {
  double h = 0.0;
  for (double f : usage) {
    if (f > 0.0) h -= f * std::log(f);
  }
  return h / std::log(double(kCharacterCount));
}

BalanceReport balance_report(const SpaceSet& spaces, const CsgParameters& csg, unsigned jobs) {
  BalanceReport r;
  r.config_hash = config_hash_hex(spaces.config());
  r.season_id = spaces.config().season_id;
  r.tolerance = csg.tolerance;
  r.matrix = matchup_matrix(spaces, csg.tolerance, jobs);
  r.matrix_score = matrix_score(r.matrix);
  r.trace = run_csg(spaces, csg, jobs);
  r.usage = r.trace.usage();
  r.usage_score = usage_score(r.usage);
  return r;
}

BalanceReport balance_report(const Config& config, const CsgParameters& csg, unsigned jobs) {
  return balance_report(SpaceSet::build(config, jobs), csg, jobs);
}

Comparison compare_configs(const Config& a, const Config& b, const CsgParameters& csg, unsigned jobs) {
  Comparison c;
  // One config's spaces at a time keeps peak memory to a single SpaceSet.
  c.a = balance_report(a, csg, jobs);
  c.b = balance_report(b, csg, jobs);
  c.matrix_delta = c.b.matrix_score - c.a.matrix_score;
  c.usage_delta = c.b.usage_score - c.a.usage_score;
  const double eps = csg.tolerance;
  if (c.matrix_delta > eps && c.usage_delta > eps) c.more_balanced = "b";
  if (c.matrix_delta < -eps && c.usage_delta < -eps) c.more_balanced = "a";
  return c;
}

namespace {

nlohmann::json report_body(const BalanceReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.matrix) {
    nlohmann::json out = nlohmann::json::array();
    for (double v : row) out.push_back(round_sig9(v));
    rows.push_back(std::move(out));
  }
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : all_pairs()) pairs.push_back(pair_name(p));
  nlohmann::json usage = nlohmann::json::object();
  for (auto c : kAllCharacters) usage[std::string(name_of(c))] = round_sig9(r.usage[index_of(c)]);
  return {
      {"config_hash", r.config_hash},
      {"season_id", r.season_id},
      {"tolerance", r.tolerance},
      {"pairs", pairs},
      {"matrix", rows},
      {"matrix_score", round_sig9(r.matrix_score)},
      {"usage", usage},
      {"usage_score", round_sig9(r.usage_score)},
      {"csg", to_json(r.trace)},
  };
}

}  // namespace

nlohmann::json to_json(const BalanceReport& report) {
  auto j = report_body(report);
  j["kind"] = "balance_report";
  j["tool"] = kToolName;
  j["version"] = kVersion;
  return j;
}

nlohmann::json to_json(const Comparison& c) {
  return {
      {"kind", "balance_comparison"},
      {"tool", kToolName},
      {"version", kVersion},
      {"a", report_body(c.a)},
      {"b", report_body(c.b)},
      {"matrix_score_delta", round_sig9(c.matrix_delta)},
      {"usage_score_delta", round_sig9(c.usage_delta)},
      {"more_balanced", c.more_balanced ? nlohmann::json(*c.more_balanced) : nlohmann::json(nullptr)},
  };
}

}  // namespace rpglite::balance
