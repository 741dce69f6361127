// rpglite: one binary for every pipeline. Exit 0 on success, 1 on a domain
// error, 2 on a usage error (synopsis on stderr).
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpglite/balance/report.hpp"
#include "rpglite/core/error.hpp"
#include "rpglite/core/parallel.hpp"
#include "rpglite/core/rng.hpp"
#include "rpglite/core/serialize.hpp"
#include "rpglite/core/timefmt.hpp"
#include "rpglite/core/version.hpp"
#include "rpglite/service/http.hpp"
#include "rpglite/service/service.hpp"
#include "rpglite/sim/analytics.hpp"
#include "rpglite/sim/dataset.hpp"
#include "rpglite/sim/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rpglite::cli {
namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

Config load_config(const fs::path& path) { return validate_config(read_json(path)); }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// Stamped into every output: which command ran with which parameters. --jobs
// and output paths are left out, so files do not depend on them.
json invocation(const std::string& command, json parameters) {
  return {{"command", command}, {"parameters", std::move(parameters)}};
}

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// --- input loading -------------------------------------------------------

// A dataset directory, or a file written by `simulate` (its two bots become
// the players).
sim::Dataset load_games(const fs::path& input) {
  if (fs::is_directory(input)) return sim::read_dataset(input);
  const json j = read_json(input);
  if (j.value("kind", "") != "simulation") {
    throw Error(ErrorCode::SchemaViolation, input.string() + ": expected a dataset directory or simulate output");
  }
  sim::Dataset d;
  try {
    d.configs.push_back(validate_config(j.at("config")));
    for (const auto& g : j.at("games")) d.games.push_back(sim::game_record_from_json(g));
    for (const auto& name : j.at("usernames")) {
      sim::PlayerRecord p;
      p.username = name.get<std::string>();
      d.players.push_back(p);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, input.string() + ": " + e.what());
  }
  if (d.games.empty() && !j.at("games").empty()) throw Error(ErrorCode::SchemaViolation, "no games");
  return d;
}

void ensure_values(const sim::Dataset& d, solver::ArtifactStore& store, unsigned jobs) {
  std::vector<std::pair<const Config*, solver::Matchup>> todo;
  for (const auto& g : d.games) todo.push_back({&d.config_for(g), solver::unordered({g.pairs[0], g.pairs[1]})});
  std::sort(todo.begin(), todo.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first, a.second) < std::tie(b.first, b.second);
  });
  todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
  parallel_for(todo.size(), jobs, [&](std::size_t i) { store.ensure(*todo[i].first, todo[i].second); });
}

// --- options shared by several commands -----------------------------------

struct Common {
  unsigned jobs = 1;
};

struct CsgFlags {
  int iterations = 10;
  double epsilon = 0.01;
  int window = 0;
  double tol = solver::kDefaultTolerance;

  void add(CLI::App* app) {
    app->add_option("--iterations", iterations, "CSG generations after the seed")->check(CLI::NonNegativeNumber);
    app->add_option("--epsilon", epsilon, "stop once the best response gains less than this over 0.5")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--window", window, "keep only the newest N metagame members (0 = all)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--tol", tol, "value iteration tolerance")->check(CLI::PositiveNumber);
  }
  balance::CsgParameters params() const { return {iterations, epsilon, window, tol}; }
  json echo() const { return {{"iterations", iterations}, {"epsilon", epsilon}, {"window", window}, {"tol", tol}}; }
};

// --- config ----------------------------------------------------------------

void add_config(CLI::App& app) {
  auto* cfg = app.add_subcommand("config", "Configuration files");
  cfg->require_subcommand(1);

  auto* validate = cfg->add_subcommand("validate", "Check a configuration and echo its 29 attributes");
  static std::string file, out;
  validate->add_option("file", file, "configuration JSON")->required();
  validate->add_option("-o,--output", out, "output file (default stdout)");
  validate->callback([] {
    const Config c = load_config(file);
    json j = {{"kind", "config"},
              {"tool", kToolName},
              {"version", kVersion},
              {"invocation", invocation("config validate", {{"file", file}})},
              {"config_hash", config_hash_hex(c)},
              {"season_id", c.season_id},
              {"attributes", kAttributeCount},
              {"config", to_json(c)}};
    write_json(out, j);
  });

  auto* defaults = cfg->add_subcommand("defaults", "Print a built-in configuration");
  static std::string name, dout;
  defaults->add_option("name", name, "season1 | season2 | identical")
      ->required()
      ->check(CLI::IsMember({"season1", "season2", "identical"}));
  defaults->add_option("-o,--output", dout, "output file (default stdout)");
  defaults->callback([] {
    const Config c = name == "season1"   ? season1_defaults()
                     : name == "season2" ? season2_defaults()
                                         : identical_characters_config();
    write_json(dout, to_json(c));
  });
}

// --- solve -----------------------------------------------------------------

json matchup_summary(const solver::MatchupValues& v, const solver::Matchup& m, const Config& c) {
  const double f0 = v.value(initial_state(m.pair0, m.pair1, 0, c), 0);
  const double f1 = v.value(initial_state(m.pair0, m.pair1, 1, c), 0);
  return {{"pair0", pair_name(m.pair0)},
          {"pair1", pair_name(m.pair1)},
          {"states", v.solved().keys.size()},
          {"value_first_mover_0", round_sig9(f0)},
          {"value_first_mover_1", round_sig9(f1)},
          {"coin_flip_value", round_sig9((f0 + f1) / 2)}};
}

void add_solve(CLI::App& app, Common& common) {
  auto* solve = app.add_subcommand("solve", "Solve one matchup (or all) and write value artifacts");
  static std::string config, pair0, pair1, artifacts = "artifacts", out;
  static double tol = solver::kDefaultTolerance;
  static bool all = false;
  solve->add_option("--config", config, "configuration JSON")->required();
  auto* p0 = solve->add_option("--pair0", pair0, "side-0 pair, e.g. knight,wizard");
  auto* p1 = solve->add_option("--pair1", pair1, "side-1 pair");
  auto* a = solve->add_flag("--all", all, "solve all 406 unordered matchups");
  p0->excludes(a);
  p1->excludes(a);
  p0->needs(p1);
  p1->needs(p0);
  solve->add_option("--tol", tol, "value iteration tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--artifacts", artifacts, "artifact directory");
  solve->add_option("-o,--output", out, "output file (default stdout)");
  solve->callback([&common] {
    if (!all && pair0.empty()) throw CLI::RequiredError("--pair0/--pair1 or --all");
    const Config c = load_config(config);
    solver::ArtifactStore store(artifacts);
    json j = {{"kind", all ? "solve_all" : "solve"},
              {"tool", kToolName},
              {"version", kVersion},
              {"config_hash", config_hash_hex(c)},
              {"season_id", c.season_id}};
    if (all) {
      std::vector<solver::Matchup> ms;
      for (std::size_t i = 0; i < kPairCount; ++i) {
        for (std::size_t k = i; k < kPairCount; ++k) ms.push_back({pair_at(i), pair_at(k)});
      }
      std::vector<json> rows(ms.size());
      parallel_for(ms.size(), common.jobs, [&](std::size_t i) {
        rows[i] = matchup_summary(store.ensure(c, ms[i], tol), ms[i], c);
      });
      j["invocation"] = invocation("solve", {{"config", config}, {"all", true}, {"tol", tol}});
      j["matchups"] = rows;
    } else {
      const solver::Matchup m{parse_pair(pair0), parse_pair(pair1)};
      const auto v = store.ensure(c, m, tol);
      j["invocation"] =
          invocation("solve", {{"config", config}, {"pair0", pair_name(m.pair0)}, {"pair1", pair_name(m.pair1)},
                               {"tol", tol}});
      j["artifact"] = solver::ArtifactStore::file_for(artifacts, config_hash_hex(c), solver::unordered(m)).string();
      j["matchup"] = matchup_summary(v, m, c);
      std::cerr << "coin-flip value " << fmt9(j["matchup"]["coin_flip_value"].get<double>()) << "\n";
    }
    write_json(out, j);
  });
}

// --- csg / balance -----------------------------------------------------------

void add_csg(CLI::App& app, Common& common) {
  auto* csg = app.add_subcommand("csg", "Chained strategy generation");
  csg->require_subcommand(1);
  auto* run = csg->add_subcommand("run", "Run CSG on one configuration and write the trace");
  static std::string config, out;
  static CsgFlags flags;
  run->add_option("--config", config, "configuration JSON")->required();
  flags.add(run);
  run->add_option("-o,--output", out, "output file (default stdout)");
  run->callback([&common] {
    const Config c = load_config(config);
    json j = balance::to_json(balance::run_csg(c, flags.params(), common.jobs));
    auto echo = flags.echo();
    echo["config"] = config;
    j["invocation"] = invocation("csg run", echo);
    write_json(out, j);
  });
}

void add_balance(CLI::App& app, Common& common) {
  auto* bal = app.add_subcommand("balance", "Balance reports");
  bal->require_subcommand(1);

  auto* report = bal->add_subcommand("report", "Matchup matrix, CSG usage and scores for one configuration");
  static std::string config, out;
  static CsgFlags rflags;
  report->add_option("--config", config, "configuration JSON")->required();
  rflags.add(report);
  report->add_option("-o,--output", out, "output file (default stdout)");
  report->callback([&common] {
    json j = balance::to_json(balance::balance_report(load_config(config), rflags.params(), common.jobs));
    auto echo = rflags.echo();
    echo["config"] = config;
    j["invocation"] = invocation("balance report", echo);
    write_json(out, j);
  });

  auto* compare = bal->add_subcommand("compare", "Compare two configurations");
  static std::string a, b, cout_;
  static CsgFlags cflags;
  compare->add_option("a", a, "baseline configuration JSON")->required();
  compare->add_option("b", b, "candidate configuration JSON")->required();
  cflags.add(compare);
  compare->add_option("-o,--output", cout_, "output file (default stdout)");
  compare->callback([&common] {
    json j = balance::to_json(balance::compare_configs(load_config(a), load_config(b), cflags.params(), common.jobs));
    auto echo = cflags.echo();
    echo["a"] = a;
    echo["b"] = b;
    j["invocation"] = invocation("balance compare", echo);
    write_json(cout_, j);
  });
}

// --- simulate ----------------------------------------------------------------

void add_simulate(CLI::App& app, Common& common) {
  auto* simc = app.add_subcommand("simulate", "Play seeded bot-vs-bot games");
  static std::string config, bot0 = "optimal", bot1 = "optimal", artifacts = "artifacts", out;
  static int games = 1000, move_cap = sim::kDefaultMoveCap;
  static std::uint64_t seed = 1;
  static bool solve_missing = false, summary_only = false;
  simc->add_option("--config", config, "configuration JSON")->required();
  simc->add_option("--bot0", bot0, "bot spec kind[:param][@pair], e.g. epsilon:0.3@knight,archer");
  simc->add_option("--bot1", bot1, "bot spec for side 1");
  simc->add_option("--games", games, "number of games")->check(CLI::NonNegativeNumber);
  simc->add_option("--seed", seed, "base seed; game i uses derive_seed(seed, i)");
  simc->add_option("--move-cap", move_cap, "moves before a game is abandoned")->check(CLI::PositiveNumber);
  simc->add_option("--artifacts", artifacts, "artifact directory");
  simc->add_flag("--solve-missing", solve_missing, "solve matchups with no artifact");
  simc->add_flag("--summary-only", summary_only, "omit the game records");
  simc->add_option("-o,--output", out, "output file (default stdout)");
  simc->callback([&common] {
    const Config c = load_config(config);
    const auto spec0 = sim::parse_bot_spec(bot0);
    const auto spec1 = sim::parse_bot_spec(bot1);
    solver::ArtifactStore store(artifacts);
    if (solve_missing && (sim::needs_values(spec0) || sim::needs_values(spec1))) {
      // Solve up front so --jobs also speeds this part up.
      std::vector<solver::Matchup> ms;
      for (std::size_t i = 0; i < kPairCount; ++i) {
        for (std::size_t k = i; k < kPairCount; ++k) ms.push_back({pair_at(i), pair_at(k)});
      }
      parallel_for(ms.size(), common.jobs, [&](std::size_t i) { store.ensure(c, ms[i]); });
    }
    const sim::Bot b0 = sim::make_bot(spec0, c, &store, solve_missing);
    const sim::Bot b1 = sim::make_bot(spec1, c, &store, solve_missing);

    auto annealed = [&](const sim::BotSpec& s, int i) -> std::optional<double> {
      if (!s.epsilon_end || games < 2) return std::nullopt;
      return s.epsilon + (*s.epsilon_end - s.epsilon) * i / (games - 1);
    };
    std::vector<sim::GameRecord> records(static_cast<std::size_t>(games));
    parallel_for(records.size(), common.jobs, [&](std::size_t i) {
      sim::SimulationOptions o;
      o.move_cap = move_cap;
      char id[32];
      std::snprintf(id, sizeof id, "sim%06zu", i + 1);
      o.game_id = id;
      o.start_ms = static_cast<std::int64_t>(i) * 3'600'000;
      o.epsilon = {annealed(spec0, static_cast<int>(i)), annealed(spec1, static_cast<int>(i))};
      records[i] = sim::simulate_game(b0, b1, c, derive_seed(seed, i), o);
    });

    int wins[2] = {0, 0}, capped = 0;
    std::size_t moves = 0;
    for (const auto& r : records) {
      if (r.winner) ++wins[*r.winner];
      if (r.end_reason == sim::EndReason::Cap) ++capped;
      moves += r.moves.size();
    }
    const double n = std::max(1, games);
    const double p0 = wins[0] / n;
    json games_json = json::array();
    if (!summary_only) {
      for (const auto& r : records) games_json.push_back(sim::to_json(r));
    }
    json j = {{"kind", "simulation"},
              {"tool", kToolName},
              {"version", kVersion},
              {"invocation", invocation("simulate", {{"config", config},
                                                     {"bot0", sim::to_string(spec0)},
                                                     {"bot1", sim::to_string(spec1)},
                                                     {"games", games},
                                                     {"seed", seed},
                                                     {"move_cap", move_cap},
                                                     {"summary_only", summary_only}})},
              {"config_hash", config_hash_hex(c)},
              {"season_id", c.season_id},
              {"config", to_json(c)},
              {"usernames", {"bot0", "bot1"}},
              {"summary",
               {{"games", games},
                {"wins", {wins[0], wins[1]}},
                {"capped", capped},
                {"win_rate0", round_sig9(p0)},
                {"standard_error", round_sig9(std::sqrt(p0 * (1 - p0) / n))},
                {"mean_moves", round_sig9(static_cast<double>(moves) / n)}}},
              {"games", games_json}};
    write_json(out, j);
  });
}

// --- analyze -----------------------------------------------------------------

struct AnalyzeFlags {
  std::string input, artifacts = "artifacts", out, format = "json";
  bool solve_missing = false;

  void add(CLI::App* app) {
    app->add_option("input", input, "dataset directory or simulate output")->required();
    app->add_option("--artifacts", artifacts, "artifact directory");
    app->add_flag("--solve-missing", solve_missing, "solve matchups with no artifact");
    app->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("-o,--output", out, "output file (default stdout)");
  }
};

void add_analyze(CLI::App& app, Common& common) {
  auto* an = app.add_subcommand("analyze", "Move costs, learning curves and dataset statistics");
  an->require_subcommand(1);

  auto* costs = an->add_subcommand("costs", "Per-move cost (kappa) of every recorded move");
  static AnalyzeFlags cf;
  static std::string game_id;
  cf.add(costs);
  costs->add_option("--game", game_id, "only this game");
  costs->callback([&common] {
    auto d = load_games(cf.input);
    if (!game_id.empty()) {
      std::erase_if(d.games, [](const sim::GameRecord& g) { return g.game_id != game_id; });
      if (d.games.empty()) throw Error(ErrorCode::MissingArtifact, "no game " + game_id);
    }
    solver::ArtifactStore store(cf.artifacts);
    if (cf.solve_missing) ensure_values(d, store, common.jobs);
    std::vector<std::vector<sim::MoveCost>> all(d.games.size());
    parallel_for(d.games.size(), common.jobs,
                 [&](std::size_t i) { all[i] = sim::move_costs(d.games[i], d.config_for(d.games[i]), store); });
    if (cf.format == "csv") {
      std::string text = "game_id,index,side,username,move,value,q_best,q_move,kappa\n";
      for (std::size_t g = 0; g < all.size(); ++g) {
        for (const auto& m : all[g]) {
          text += csv_field(d.games[g].game_id) + "," + std::to_string(m.index) + "," + std::to_string(m.side) + "," +
                  csv_field(m.username) + "," + csv_field(describe(m.move)) + "," + fmt9(m.value) + "," +
                  fmt9(m.q_best) + "," + fmt9(m.q_move) + "," + fmt9(m.kappa) + "\n";
        }
      }
      write_text(cf.out, text);
      return;
    }
    json rows = json::array();
    for (std::size_t g = 0; g < all.size(); ++g) {
      json moves = json::array();
      double sum = 0.0;
      for (const auto& m : all[g]) {
        moves.push_back(sim::to_json(m));
        sum += m.kappa;
      }
      rows.push_back({{"game_id", d.games[g].game_id},
                      {"usernames", d.games[g].usernames},
                      {"mean_kappa", all[g].empty() ? json(nullptr) : json(round_sig9(sum / all[g].size()))},
                      {"moves", moves}});
    }
    write_json(cf.out, {{"kind", "move_costs"},
                        {"tool", kToolName},
                        {"version", kVersion},
                        {"invocation", invocation("analyze costs", {{"input", cf.input}, {"game", game_id}})},
                        {"games", rows}});
  });

  auto* learning = an->add_subcommand("learning", "Per-player learning curves over mean kappa");
  static AnalyzeFlags lf;
  static int window = 5;
  lf.add(learning);
  learning->add_option("--window", window, "moving-average window")->check(CLI::PositiveNumber);
  learning->callback([&common] {
    const auto d = load_games(lf.input);
    solver::ArtifactStore store(lf.artifacts);
    if (lf.solve_missing) ensure_values(d, store, common.jobs);
    const auto curves = sim::player_learning(d, store, window);
    if (lf.format == "csv") {
      std::string text = "username,game,game_id,mean_kappa,moving_average\n";
      for (const auto& [name, c] : curves) {
        for (std::size_t i = 0; i < c.means.size(); ++i) {
          text += csv_field(name) + "," + std::to_string(i) + "," + csv_field(c.game_ids[i]) + "," + fmt9(c.means[i]) +
                  "," + fmt9(c.moving_average[i]) + "\n";
        }
      }
      write_text(lf.out, text);
      return;
    }
    json players = json::object();
    for (const auto& [name, c] : curves) players[name] = sim::to_json(c);
    write_json(lf.out, {{"kind", "learning_curves"},
                        {"tool", kToolName},
                        {"version", kVersion},
                        {"invocation", invocation("analyze learning", {{"input", lf.input}, {"window", window}})},
                        {"players", players}});
  });

  auto* stats = an->add_subcommand("stats", "Acquisition, retention and character statistics");
  static AnalyzeFlags sf;
  sf.add(stats);
  stats->callback([] {
    const auto s = sim::dataset_stats(load_games(sf.input));
    if (sf.format == "csv") {
      // With -o the tables go to <dir>/<name>.csv; on stdout they are
      // separated by "# name" lines.
      const auto tables = sim::to_csv(s);
      if (sf.out.empty() || sf.out == "-") {
        std::string text;
        for (const auto& [name, t] : tables) text += "# " + name + "\n" + t;
        write_text("", text);
      } else {
        fs::create_directories(sf.out);
        for (const auto& [name, t] : tables) write_text((fs::path(sf.out) / (name + ".csv")).string(), t);
      }
      return;
    }
    json j = sim::to_json(s);
    j["kind"] = "dataset_stats";
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["invocation"] = invocation("analyze stats", {{"input", sf.input}});
    write_json(sf.out, j);
  });
}

// --- dataset -----------------------------------------------------------------

std::int64_t parse_date(const std::string& text) {
  return parse_utc_ms(text.size() == 10 ? text + "T00:00:00.000Z" : text);
}

void add_dataset(CLI::App& app, Common& common) {
  auto* ds = app.add_subcommand("dataset", "Synthetic datasets");
  ds->require_subcommand(1);
  auto* exp = ds->add_subcommand("export", "Generate a bot-population dataset directory");
  static std::vector<std::string> population, schedule;
  static std::string config, house = "uniform", epoch = "2019-04-01", medals, artifacts = "artifacts", out;
  static std::uint64_t seed = 1;
  static int move_cap = sim::kDefaultMoveCap;
  static double arrival = 6.0, gap = 12.0;
  static bool solve_missing = false;
  exp->add_option("--population", population, "SPEC*PLAYERS*GAMES, repeatable")->required();
  exp->add_option("--config", config, "configuration in force from the epoch")->required();
  exp->add_option("--schedule", schedule, "CONFIG@YYYY-MM-DD: switch configuration at a date, repeatable");
  exp->add_option("--house", house, "bot spec of the shared opponent");
  exp->add_option("--epoch", epoch, "first arrival time (YYYY-MM-DD)");
  exp->add_option("--arrival-hours", arrival, "mean hours between player arrivals")->check(CLI::PositiveNumber);
  exp->add_option("--gap-hours", gap, "mean hours between a player's games")->check(CLI::PositiveNumber);
  exp->add_option("--seed", seed, "generator seed");
  exp->add_option("--move-cap", move_cap, "moves before a game is abandoned")->check(CLI::PositiveNumber);
  exp->add_option("--medals", medals, "medal rules JSON");
  exp->add_option("--artifacts", artifacts, "artifact directory");
  exp->add_flag("--solve-missing", solve_missing, "solve matchups with no artifact");
  exp->add_option("-o,--output", out, "dataset directory")->required();
  exp->callback([&common] {
    std::vector<sim::PopulationEntry> pop;
    for (const auto& p : population) pop.push_back(sim::parse_population_entry(p));
    sim::DatasetOptions o;
    o.seed = seed;
    o.epoch_ms = parse_date(epoch);
    o.arrival_mean_hours = arrival;
    o.game_gap_mean_hours = gap;
    o.house = sim::parse_bot_spec(house);
    o.move_cap = move_cap;
    if (!medals.empty()) o.medals = sim::MedalRules::from_json(read_json(medals));
    o.jobs = common.jobs;
    o.solve_missing = solve_missing;

    std::vector<sim::ScheduleEntry> sched{{load_config(config), o.epoch_ms}};
    json sched_echo = json::array({{{"config", config}, {"from", format_utc_ms(o.epoch_ms)}}});
    for (const auto& s : schedule) {
      const auto at = s.rfind('@');
      if (at == std::string::npos) throw CLI::ValidationError("--schedule", "expected CONFIG@YYYY-MM-DD");
      sched.push_back({load_config(s.substr(0, at)), parse_date(s.substr(at + 1))});
      sched_echo.push_back({{"config", s.substr(0, at)}, {"from", format_utc_ms(sched.back().from_ms)}});
    }
    solver::ArtifactStore store(artifacts);
    auto d = sim::generate_dataset(pop, sched, o, &store);
    json pop_echo = json::array();
    for (const auto& p : pop) {
      pop_echo.push_back({{"bot", sim::to_string(p.spec)}, {"players", p.players}, {"games", p.games}});
    }
    d.parameters = invocation("dataset export", {{"population", pop_echo},
                                                 {"schedule", sched_echo},
                                                 {"house", sim::to_string(o.house)},
                                                 {"seed", seed},
                                                 {"arrival_hours", arrival},
                                                 {"gap_hours", gap},
                                                 {"move_cap", move_cap},
                                                 {"medals", o.medals.to_json()}});
    sim::write_dataset(out, d);
    std::cerr << d.players.size() << " players, " << d.games.size() << " games -> " << out << "\n";
  });
}

// --- serve -------------------------------------------------------------------

service::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

void add_serve(CLI::App& app) {
  auto* serve = app.add_subcommand("serve", "Run the game service over HTTP");
  static std::string data, config, host = "127.0.0.1", static_dir, medals, admin, artifacts;
  static int port = 8080, iterations = 100'000;
  static std::size_t snapshot_every = 1000;
  static std::optional<std::uint64_t> seed;
  serve->add_option("--data", data, "event log and snapshot directory")->required();
  serve->add_option("--config", config, "season in force on first start (default: season 1)");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "bind port (0 = any free port)")->check(CLI::Range(0, 65535));
  serve->add_option("--static", static_dir, "directory of web client assets");
  serve->add_option("--seed", seed, "fixed-seed mode (deterministic tokens, salts and dice)");
  serve->add_option("--medals", medals, "medal rules JSON");
  serve->add_option("--admin-token", admin, "enables /v1/admin/*; falls back to $RPGLITE_ADMIN_TOKEN");
  serve->add_option("--artifacts", artifacts, "solver artifacts for bots and hints (default DATA/artifacts)");
  serve->add_option("--snapshot-every", snapshot_every, "events between snapshots (0 = never)");
  serve->add_option("--pbkdf2-iterations", iterations, "password hashing cost")->check(CLI::PositiveNumber);
  serve->callback([] {
    service::ServiceOptions o;
    o.data_dir = data;
    o.artifact_dir = artifacts;
    o.config = config.empty() ? season1_defaults() : load_config(config);
    o.seed = seed;
    if (!medals.empty()) o.medals = sim::MedalRules::from_json(read_json(medals));
    o.pbkdf2_iterations = iterations;
    o.snapshot_every = snapshot_every;
    o.admin_token = admin;
    if (o.admin_token.empty()) {
      if (const char* env = std::getenv("RPGLITE_ADMIN_TOKEN")) o.admin_token = env;
    }
    service::GameService svc(std::move(o));
    service::HttpServer server(svc, static_dir);
    const int bound = server.bind(host, port);
    std::cerr << "listening on http://" << host << ":" << bound << "\n";
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.listen();
    g_server = nullptr;
    svc.write_snapshot();
  });
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"RPGLite game analysis, simulation and service", kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  Common common;
  app.add_option("-j,--jobs", common.jobs, "worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);

  add_config(app);
  add_solve(app, common);
  add_csg(app, common);
  add_balance(app, common);
  add_simulate(app, common);
  add_analyze(app, common);
  add_dataset(app, common);
  add_serve(app);

  // Let --jobs also follow a subcommand.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* deepest = &app;
    while (!deepest->get_subcommands().empty()) deepest = deepest->get_subcommands().front();
    std::cerr << deepest->help();
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.detail() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rpglite::cli

int main(int argc, char** argv) { return rpglite::cli::run(argc, argv); }
