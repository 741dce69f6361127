#include "rpglite/sim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>

#include "rpglite/core/error.hpp"
#include "rpglite/core/hash.hpp"
#include "rpglite/core/parallel.hpp"
#include "rpglite/core/timefmt.hpp"
#include "rpglite/core/version.hpp"
#include "rpglite/sim/simulate.hpp"

namespace rpglite::sim {

nlohmann::json to_json(const InteractionEvent& e) {
  return {
      {"at", format_utc_ms(e.at_ms)},
      {"username", e.username.empty() ? nlohmann::json(nullptr) : nlohmann::json(e.username)},
      {"endpoint", e.endpoint},
      {"params_digest", e.params_digest},
      {"result", e.result},
      {"outcome", e.outcome},
  };
}

InteractionEvent interaction_from_json(const nlohmann::json& j) {
  try {
    InteractionEvent e;
    e.at_ms = parse_utc_ms(j.at("at").get<std::string>());
    if (!j.at("username").is_null()) e.username = j.at("username").get<std::string>();
    e.endpoint = j.at("endpoint").get<std::string>();
    e.params_digest = j.at("params_digest").get<std::string>();
    e.result = j.at("result").get<int>();
    e.outcome = j.at("outcome").get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::SchemaViolation, std::string("interaction: ") + ex.what());
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::SchemaViolation) throw;
    throw Error(ErrorCode::SchemaViolation, std::string("interaction: ") + ex.what());
  }
}

const Config& Dataset::config_for(const GameRecord& game) const {
  for (const auto& c : configs) {
    if (config_hash_hex(c) == game.config_hash) return c;
  }
  throw Error(ErrorCode::MissingArtifact, "dataset has no config with hash " + game.config_hash);
}

namespace {

void write_lines(const std::filesystem::path& path, const std::vector<nlohmann::json>& lines) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::SchemaViolation, "cannot write " + path.string());
  for (const auto& j : lines) f << j.dump() << '\n';
}

template <typename Fn>
void read_lines(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::SchemaViolation, "missing " + path.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(f, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaViolation, path.filename().string() + ":" + std::to_string(n) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaViolation, path.filename().string() + ":" + std::to_string(n) + ": " + e.detail());
    }
  }
}

double exponential(SplitMix64& rng, double mean) { return -mean * std::log1p(-rng.uniform()); }

constexpr std::int64_t kHourMs = 3'600'000;

}  // namespace

void write_dataset(const std::filesystem::path& dir, const Dataset& d) {
  std::filesystem::create_directories(dir);
  nlohmann::json configs = nlohmann::json::array();
  for (const auto& c : d.configs) configs.push_back(to_json(c));
  {
    std::ofstream f(dir / "configs.json", std::ios::binary | std::ios::trunc);
    f << configs.dump(2) << '\n';
  }
  nlohmann::json manifest = {
      {"schema", kDatasetSchema},
      {"tool", kToolName},
      {"version", kVersion},
      {"players", d.players.size()},
      {"games", d.games.size()},
      {"interactions", d.interactions.size()},
      {"parameters", d.parameters},
  };
  {
    std::ofstream f(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    f << manifest.dump(2) << '\n';
  }
  std::vector<nlohmann::json> lines;
  for (const auto& p : d.players) lines.push_back(to_json(p));
  write_lines(dir / "players.ndjson", lines);
  lines.clear();
  for (const auto& g : d.games) lines.push_back(to_json(g));
  write_lines(dir / "games.ndjson", lines);
  lines.clear();
  for (const auto& e : d.interactions) lines.push_back(to_json(e));
  write_lines(dir / "interactions.ndjson", lines);
}

Dataset read_dataset(const std::filesystem::path& dir) {
  Dataset d;
  try {
    std::ifstream f(dir / "manifest.json");
    if (!f) throw Error(ErrorCode::SchemaViolation, "missing manifest.json in " + dir.string());
    auto manifest = nlohmann::json::parse(f);
    if (manifest.at("schema").get<std::string>() != kDatasetSchema) {
      throw Error(ErrorCode::SchemaViolation, "unsupported dataset schema");
    }
    d.parameters = manifest.value("parameters", nlohmann::json::object());
    std::ifstream cf(dir / "configs.json");
    if (!cf) throw Error(ErrorCode::SchemaViolation, "missing configs.json");
    for (const auto& c : nlohmann::json::parse(cf)) d.configs.push_back(validate_config(c));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("dataset header: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaViolation) throw;
    throw Error(ErrorCode::SchemaViolation, std::string("dataset header: ") + e.what());
  }
  read_lines(dir / "players.ndjson", [&](const nlohmann::json& j) { d.players.push_back(player_record_from_json(j)); });
  read_lines(dir / "games.ndjson", [&](const nlohmann::json& j) { d.games.push_back(game_record_from_json(j)); });
  read_lines(dir / "interactions.ndjson",
             [&](const nlohmann::json& j) { d.interactions.push_back(interaction_from_json(j)); });
  return d;
}

PopulationEntry parse_population_entry(const std::string& text) {
  const auto a = text.rfind('*');
  const auto b = a == std::string::npos || a == 0 ? std::string::npos : text.rfind('*', a - 1);
  if (b == std::string::npos) throw Error(ErrorCode::ParseError, "population entry must be SPEC*PLAYERS*GAMES: " + text);
  PopulationEntry e;
  e.spec = parse_bot_spec(text.substr(0, b));
  try {
    e.players = std::stoi(text.substr(b + 1, a - b - 1));
    e.games = std::stoi(text.substr(a + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad counts in population entry: " + text);
  }
  if (e.players < 1 || e.games < 1) throw Error(ErrorCode::OutOfRange, "population counts must be positive: " + text);
  return e;
}

Dataset generate_dataset(const std::vector<PopulationEntry>& population, std::vector<ScheduleEntry> schedule,
                         const DatasetOptions& options, solver::ArtifactStore* store) {
  if (population.empty()) throw Error(ErrorCode::OutOfRange, "population is empty");
  if (schedule.empty()) throw Error(ErrorCode::OutOfRange, "config schedule is empty");
  std::stable_sort(schedule.begin(), schedule.end(), [](const auto& a, const auto& b) { return a.from_ms < b.from_ms; });

  struct Player {
    BotSpec spec;
    int games;
    PlayerRecord record;
  };
  std::vector<Player> players;
  for (const auto& entry : population) {
    for (int k = 0; k < entry.players; ++k) {
      Player p{entry.spec, entry.games, {}};
      char name[16];
      std::snprintf(name, sizeof name, "player%04zu", players.size() + 1);
      p.record.username = name;
      p.record.extra = {{"bot", to_string(entry.spec)}, {"games_requested", entry.games}};
      players.push_back(std::move(p));
    }
  }

  // Arrivals, then each player's game start times.
  SplitMix64 arrivals(derive_seed(options.seed, 0));
  std::int64_t t = options.epoch_ms;
  struct Slot {
    std::int64_t start;
    std::size_t player;
    int index;
  };
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < players.size(); ++i) {
    t += static_cast<std::int64_t>(exponential(arrivals, options.arrival_mean_hours) * kHourMs);
    players[i].record.created_at_ms = t;
    SplitMix64 gaps(derive_seed(derive_seed(options.seed, 1), i));
    std::int64_t g = t;
    for (int k = 0; k < players[i].games; ++k) {
      g += 60'000 + static_cast<std::int64_t>(exponential(gaps, options.game_gap_mean_hours) * kHourMs);
      slots.push_back({g, i, k});
    }
  }
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    return std::tie(a.start, a.player, a.index) < std::tie(b.start, b.player, b.index);
  });

  auto config_at = [&](std::int64_t when) -> const Config& {
    const Config* c = &schedule.front().config;
    for (const auto& s : schedule) {
      if (s.from_ms <= when) c = &s.config;
    }
    return *c;
  };

  // One bot per (spec, config), built up front so games can run in parallel.
  std::map<std::pair<std::string, std::string>, std::unique_ptr<Bot>> bots;
  auto bot_key = [](const BotSpec& s, const Config& c) { return std::make_pair(to_string(s), config_hash_hex(c)); };
  for (const auto& slot : slots) {
    const Config& c = config_at(slot.start);
    for (const BotSpec* spec : std::array<const BotSpec*, 2>{&players[slot.player].spec, &options.house}) {
      auto key = bot_key(*spec, c);
      if (!bots.count(key)) bots[key] = std::make_unique<Bot>(make_bot(*spec, c, store, options.solve_missing));
    }
  }

  Dataset d;
  for (const auto& s : schedule) {
    const auto h = config_hash_hex(s.config);
    if (std::none_of(d.configs.begin(), d.configs.end(), [&](const Config& c) { return config_hash_hex(c) == h; })) {
      d.configs.push_back(s.config);
    }
  }
  d.games.resize(slots.size());
  parallel_for(slots.size(), options.jobs, [&](std::size_t n) {
    const Slot& slot = slots[n];
    const Player& p = players[slot.player];
    const Config& c = config_at(slot.start);
    SimulationOptions so;
    so.move_cap = options.move_cap;
    so.usernames = {p.record.username, "house"};
    char id[16];
    std::snprintf(id, sizeof id, "g%06zu", n + 1);
    so.game_id = id;
    so.start_ms = slot.start;
    if (p.spec.kind == BotKind::EpsilonGreedy && p.spec.epsilon_end) {
      const double frac = p.games > 1 ? double(slot.index) / double(p.games - 1) : 0.0;
      so.epsilon[0] = p.spec.epsilon + (*p.spec.epsilon_end - p.spec.epsilon) * frac;
    }
    const std::uint64_t seed = derive_seed(derive_seed(options.seed, 2 + slot.player), std::uint64_t(slot.index));
    d.games[n] = simulate_game(*bots.at(bot_key(p.spec, c)), *bots.at(bot_key(options.house, c)), c, seed, so);
  });

  // Bookkeeping and interaction log, in chronological order.
  auto digest = [](const std::string& text) { return hex64(fnv1a64(text)); };
  std::vector<std::pair<std::int64_t, InteractionEvent>> events;
  auto log = [&](std::int64_t at, const std::string& user, const std::string& endpoint, const std::string& params,
                 int result, const std::string& outcome) {
    events.push_back({at, InteractionEvent{at, user, endpoint, digest(params), result, outcome}});
  };
  for (const auto& p : players) {
    log(p.record.created_at_ms, p.record.username, "POST /v1/register", p.record.username, 201, "registered");
  }
  std::map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < players.size(); ++i) by_name[players[i].record.username] = i;
  for (const auto& g : d.games) {
    Player& p = players[by_name.at(g.usernames[0])];
    const Config& c = d.config_for(g);
    const std::string base = "/v1/games/" + g.game_id;
    log(g.started_at_ms - 2000, p.record.username, "POST /v1/queue", "slot", 200, "matched");
    log(g.started_at_ms - 1000, p.record.username, "POST " + base + "/pair", pair_name(g.pairs[0]), 200, "pair_selected");
    for (std::size_t k = 0; k < g.moves.size(); ++k) {
      if (g.moves[k].side != 0) continue;
      log(g.moves[k].at_ms, p.record.username, "POST " + base + "/moves", describe(g.moves[k].move) + "#" + std::to_string(k),
          200, "move_accepted");
    }
    log(g.ended_at_ms + 1000, p.record.username, "GET " + base, g.game_id, 200, "game_" + to_string(g.end_reason));
    if (g.winner) {
      auto final_state = g.moves.empty() ? initial_state(g.pairs[0], g.pairs[1], g.first_mover, c) : g.moves.back().after;
      record_result(p.record, g, 0, final_state, c, options.medals);
      if (*g.winner == 0) {
        p.record.skill = elo_update(p.record.skill, kInitialSkill).first;
      } else {
        p.record.skill = elo_update(kInitialSkill, p.record.skill).second;
      }
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [at, e] : events) d.interactions.push_back(std::move(e));
  for (auto& p : players) d.players.push_back(std::move(p.record));
  return d;
}

}  // namespace rpglite::sim
