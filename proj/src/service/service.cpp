#include "rpglite/service/service.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <deque>
#include <fstream>
#include <mutex>

#include "rpglite/core/error.hpp"
#include "rpglite/core/rng.hpp"
#include "rpglite/core/serialize.hpp"
#include "rpglite/core/timefmt.hpp"
#include "rpglite/core/version.hpp"
#include "rpglite/service/auth.hpp"
#include "rpglite/sim/analytics.hpp"
#include "rpglite/sim/bot.hpp"
#include "rpglite/sim/dataset.hpp"

namespace rpglite::service {

namespace {

using nlohmann::json;

struct ApiError {
  int status;
  std::string code;
  std::string message;
};

[[noreturn]] void fail(int status, std::string code, std::string message) {
  throw ApiError{status, std::move(code), std::move(message)};
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool valid_username(const std::string& u) {
  if (u.size() < 3 || u.size() > 20) return false;
  return std::all_of(u.begin(), u.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

enum class SlotKind { Empty, Queued, Active };

std::string to_string(SlotKind k) {
  switch (k) {
    case SlotKind::Empty: return "empty";
    case SlotKind::Queued: return "queued";
    case SlotKind::Active: return "active";
  }
  return "empty";
}

SlotKind slot_kind(const std::string& s) {
  if (s == "queued") return SlotKind::Queued;
  if (s == "active") return SlotKind::Active;
  return SlotKind::Empty;
}

struct Slot {
  SlotKind kind = SlotKind::Empty;
  std::string game_id;
};

struct Account {
  std::string username;
  std::string digest;
  std::int64_t created_at = 0;
  bool research_consent = false;
  bool age_over_15 = false;
  std::map<std::string, int> ratings;  // season id -> skill
  sim::PlayerRecord record;
  std::array<Slot, kSlotCount> slots{};

  int skill(const std::string& season) const {
    auto it = ratings.find(season);
    return it == ratings.end() ? sim::kInitialSkill : it->second;
  }
};

enum class GameStatus { Selecting, Active, Finished, Cancelled };

std::string to_string(GameStatus s) {
  switch (s) {
    case GameStatus::Selecting: return "selecting";
    case GameStatus::Active: return "active";
    case GameStatus::Finished: return "finished";
    case GameStatus::Cancelled: return "cancelled";
  }
  return "selecting";
}

GameStatus game_status(const std::string& s) {
  if (s == "active") return GameStatus::Active;
  if (s == "finished") return GameStatus::Finished;
  if (s == "cancelled") return GameStatus::Cancelled;
  return GameStatus::Selecting;
}

struct Game {
  std::string id;
  std::array<std::string, 2> players;  // display names; a bot is "bot:<spec>"
  std::array<int, 2> slots{-1, -1};
  std::string season_id;
  std::string config_hash;
  std::array<std::optional<Pair>, 2> pairs;
  std::optional<Side> first_mover;
  GameState state;
  std::vector<sim::MoveRecord> moves;
  std::map<std::size_t, json> responses;  // stored replies, by sequence
  GameStatus status = GameStatus::Selecting;
  std::optional<Side> winner;
  sim::EndReason end_reason = sim::EndReason::Open;
  std::int64_t created_at = 0;
  std::int64_t started_at = 0;
  std::int64_t ended_at = 0;
  std::string bot;  // spec of the side-1 bot; empty for human games
  bool coach = false;

  bool ranked() const { return bot.empty(); }
  bool human(Side s) const { return s == 0 || bot.empty(); }
};

struct QueueEntry {
  std::string user;  // lowercase key
  int slot = 0;
  std::int64_t at = 0;
};

struct State {
  std::map<std::string, Account> accounts;    // lowercase username -> account
  std::map<std::string, std::string> tokens;  // sha256(token) -> lowercase username
  std::map<std::string, Game> games;
  std::deque<QueueEntry> queue;
  std::uint64_t next_game = 1;
  std::string active_hash;
  std::map<std::string, Config> configs;
  std::uint64_t rng = 0;
  std::uint64_t seq = 0;
};

// ---- JSON for internal state (snapshots and state_json) -------------------

json move_record_json(const sim::MoveRecord& m) {
  return {
      {"side", m.side},
      {"actor", m.actor ? json(std::string(name_of(*m.actor))) : json(nullptr)},
      {"move", to_json(m.move)},
      {"events", to_json(m.events)},
      {"after", to_json(m.after)},
      {"at", m.at_ms},
  };
}

sim::MoveRecord move_record_from(const json& j) {
  sim::MoveRecord m;
  m.side = static_cast<Side>(j.at("side").get<int>());
  if (!j.at("actor").is_null()) m.actor = parse_character(j.at("actor").get<std::string>());
  m.move = move_from_json(j.at("move"));
  m.events = events_from_json(j.at("events"));
  m.after = game_state_from_json(j.at("after"));
  m.at_ms = j.at("at").get<std::int64_t>();
  return m;
}

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json game_json(const Game& g) {
  json moves = json::array();
  for (const auto& m : g.moves) moves.push_back(move_record_json(m));
  json responses = json::object();
  for (const auto& [k, v] : g.responses) responses[std::to_string(k)] = v;
  json pairs = json::array();
  for (const auto& p : g.pairs) pairs.push_back(p ? to_json(*p) : json(nullptr));
  return {
      {"id", g.id},
      {"players", g.players},
      {"slots", g.slots},
      {"season_id", g.season_id},
      {"config_hash", g.config_hash},
      {"pairs", pairs},
      {"first_mover", opt_json(g.first_mover)},
      {"state", g.status == GameStatus::Selecting ? json(nullptr) : to_json(g.state)},
      {"moves", moves},
      {"responses", responses},
      {"status", to_string(g.status)},
      {"winner", opt_json(g.winner)},
      {"end_reason", sim::to_string(g.end_reason)},
      {"created_at", g.created_at},
      {"started_at", g.started_at},
      {"ended_at", g.ended_at},
      {"bot", g.bot},
      {"coach", g.coach},
  };
}

Game game_from(const json& j) {
  Game g;
  g.id = j.at("id").get<std::string>();
  g.players = j.at("players").get<std::array<std::string, 2>>();
  g.slots = j.at("slots").get<std::array<int, 2>>();
  g.season_id = j.at("season_id").get<std::string>();
  g.config_hash = j.at("config_hash").get<std::string>();
  for (int s = 0; s < 2; ++s) {
    if (!j.at("pairs").at(s).is_null()) g.pairs[s] = pair_from_json(j.at("pairs").at(s));
  }
  if (!j.at("first_mover").is_null()) g.first_mover = static_cast<Side>(j.at("first_mover").get<int>());
  if (!j.at("state").is_null()) g.state = game_state_from_json(j.at("state"));
  for (const auto& m : j.at("moves")) g.moves.push_back(move_record_from(m));
  for (const auto& [k, v] : j.at("responses").items()) g.responses[std::stoul(k)] = v;
  g.status = game_status(j.at("status").get<std::string>());
  if (!j.at("winner").is_null()) g.winner = static_cast<Side>(j.at("winner").get<int>());
  g.end_reason = sim::parse_end_reason(j.at("end_reason").get<std::string>());
  g.created_at = j.at("created_at").get<std::int64_t>();
  g.started_at = j.at("started_at").get<std::int64_t>();
  g.ended_at = j.at("ended_at").get<std::int64_t>();
  g.bot = j.at("bot").get<std::string>();
  g.coach = j.at("coach").get<bool>();
  return g;
}

json account_json(const Account& a) {
  json slots = json::array();
  for (const auto& s : a.slots) slots.push_back({{"state", to_string(s.kind)}, {"game_id", s.game_id}});
  return {
      {"username", a.username},
      {"digest", a.digest},
      {"created_at", a.created_at},
      {"research_consent", a.research_consent},
      {"age_over_15", a.age_over_15},
      {"ratings", a.ratings},
      {"record", sim::to_json(a.record)},
      {"slots", slots},
  };
}

Account account_from(const json& j) {
  Account a;
  a.username = j.at("username").get<std::string>();
  a.digest = j.at("digest").get<std::string>();
  a.created_at = j.at("created_at").get<std::int64_t>();
  a.research_consent = j.at("research_consent").get<bool>();
  a.age_over_15 = j.at("age_over_15").get<bool>();
  a.ratings = j.at("ratings").get<std::map<std::string, int>>();
  a.record = sim::player_record_from_json(j.at("record"));
  for (int k = 0; k < kSlotCount; ++k) {
    a.slots[k].kind = slot_kind(j.at("slots").at(k).at("state").get<std::string>());
    a.slots[k].game_id = j.at("slots").at(k).at("game_id").get<std::string>();
  }
  return a;
}

json state_to_json(const State& st) {
  json accounts = json::array();
  for (const auto& [k, a] : st.accounts) accounts.push_back(account_json(a));
  json games = json::array();
  for (const auto& [k, g] : st.games) games.push_back(game_json(g));
  json queue = json::array();
  for (const auto& q : st.queue) queue.push_back({{"user", q.user}, {"slot", q.slot}, {"at", q.at}});
  json configs = json::array();
  for (const auto& [h, c] : st.configs) configs.push_back(to_json(c));
  return {
      {"accounts", accounts},
      {"tokens", st.tokens},
      {"games", games},
      {"queue", queue},
      {"next_game", st.next_game},
      {"active_config", st.active_hash},
      {"configs", configs},
      {"rng", st.rng},
      {"seq", st.seq},
  };
}

State state_from_json(const json& j) {
  State st;
  for (const auto& a : j.at("accounts")) {
    auto acc = account_from(a);
    st.accounts.emplace(lower(acc.username), std::move(acc));
  }
  st.tokens = j.at("tokens").get<std::map<std::string, std::string>>();
  for (const auto& g : j.at("games")) {
    auto game = game_from(g);
    st.games.emplace(game.id, std::move(game));
  }
  for (const auto& q : j.at("queue")) {
    st.queue.push_back({q.at("user").get<std::string>(), q.at("slot").get<int>(), q.at("at").get<std::int64_t>()});
  }
  st.next_game = j.at("next_game").get<std::uint64_t>();
  st.active_hash = j.at("active_config").get<std::string>();
  for (const auto& c : j.at("configs")) {
    auto cfg = validate_config(c);
    st.configs.emplace(config_hash_hex(cfg), std::move(cfg));
  }
  st.rng = j.at("rng").get<std::uint64_t>();
  st.seq = j.at("seq").get<std::uint64_t>();
  return st;
}

// Drops the password before digesting request parameters for the log.
std::string params_digest(const Request& r) {
  std::string body = r.body;
  try {
    if (!body.empty()) {
      auto j = json::parse(body);
      if (j.is_object()) j.erase("password");
      body = j.dump();
    }
  } catch (const json::exception&) {
  }
  std::string query;
  for (const auto& [k, v] : r.query) query += k + "=" + v + "&";
  return sha256_hex(r.method + " " + r.path + "?" + query + "\n" + body).substr(0, 16);
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) out.push_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

struct GameService::Impl {
  ServiceOptions opt;
  State st;
  SplitMix64 rng;
  mutable std::mutex mu;
  std::ofstream events_out;
  std::ofstream interactions_out;
  std::uint64_t log_failures = 0;
  std::int64_t last_interaction = 0;
  solver::ArtifactStore store;
  std::map<std::pair<std::string, std::string>, std::unique_ptr<sim::Bot>> bots;

  explicit Impl(ServiceOptions o)
      : opt(std::move(o)), store(opt.artifact_dir.empty() ? opt.data_dir / "artifacts" : opt.artifact_dir) {
    if (!opt.clock) opt.clock = [] { return now_utc_ms(); };
    std::filesystem::create_directories(opt.data_dir);
    load();
    events_out.open(events_path(), std::ios::binary | std::ios::app);
    if (!events_out) throw std::runtime_error("cannot open " + events_path().string());
    interactions_out.open(opt.data_dir / "interactions.ndjson", std::ios::binary | std::ios::app);
    if (st.seq == 0) {
      rng.set_state(opt.seed ? *opt.seed : [] {
        std::uint64_t s = 0;
        for (auto b : random_bytes(8)) s = (s << 8) | b;
        return s;
      }());
      events_out << json{{"type", "header"}, {"schema", kLogSchema}, {"tool", kToolName}, {"version", kVersion}}.dump()
                 << '\n';
      emit({{"type", "season_switched"}, {"config", to_json(opt.config)}, {"at", now()}});
    }
  }

  std::filesystem::path events_path() const { return opt.data_dir / "events.ndjson"; }
  std::filesystem::path snapshot_path() const { return opt.data_dir / "snapshot.json"; }
  std::int64_t now() const { return opt.clock(); }

  // ---- persistence -------------------------------------------------------

  void load() {
    if (std::filesystem::exists(snapshot_path())) {
      std::ifstream f(snapshot_path());
      auto j = json::parse(f);
      if (j.at("schema") != kSnapshotSchema) throw Error(ErrorCode::SchemaViolation, "unknown snapshot schema");
      st = state_from_json(j.at("state"));
    }
    if (!std::filesystem::exists(events_path())) {
      if (st.seq != 0) throw Error(ErrorCode::SchemaViolation, "snapshot without an event log");
      return;
    }
    std::ifstream f(events_path(), std::ios::binary);
    std::string line;
    std::uintmax_t good = 0, offset = 0;
    std::size_t n = 0;
    while (std::getline(f, line)) {
      ++n;
      const bool complete = !f.eof();
      offset += line.size() + (complete ? 1 : 0);
      if (line.empty()) {
        good = offset;
        continue;
      }
      json e;
      try {
        e = json::parse(line);
      } catch (const json::exception&) {
        // A torn final write is dropped; anything earlier is corruption.
        if (!complete) break;
        throw Error(ErrorCode::SchemaViolation, "events.ndjson:" + std::to_string(n) + ": unparsable event");
      }
      if (!complete) break;
      good = offset;
      if (e.at("type") == "header") {
        if (e.at("schema") != kLogSchema) throw Error(ErrorCode::SchemaViolation, "unknown event log schema");
        continue;
      }
      if (e.at("seq").get<std::uint64_t>() <= st.seq) continue;
      if (e.at("seq").get<std::uint64_t>() != st.seq + 1) {
        throw Error(ErrorCode::SchemaViolation, "events.ndjson:" + std::to_string(n) + ": sequence gap");
      }
      apply(e);
    }
    f.close();
    if (std::filesystem::file_size(events_path()) != good) std::filesystem::resize_file(events_path(), good);
    rng.set_state(st.rng);
  }

  void write_snapshot() {
    const auto tmp = snapshot_path().string() + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << json{{"schema", kSnapshotSchema}, {"state", state_to_json(st)}}.dump() << '\n';
      if (!f) throw std::runtime_error("snapshot write failed");
    }
    std::filesystem::rename(tmp, snapshot_path());
  }

  // Stamps, applies and persists one domain event. `finalize` runs after the
  // state change and may add fields (the stored reply) before the write.
  json emit(json e, const std::function<void(json&)>& finalize = {}) {
    e["seq"] = st.seq + 1;
    e["rng"] = rng.state();
    apply(e);
    if (finalize) finalize(e);
    events_out << e.dump() << '\n';
    events_out.flush();
    if (!events_out) throw std::runtime_error("event log write failed");
    if (opt.snapshot_every && st.seq % opt.snapshot_every == 0) write_snapshot();
    return e;
  }

  void log_interaction(const sim::InteractionEvent& e) {
    try {
      interactions_out << sim::to_json(e).dump() << '\n';
      interactions_out.flush();
      if (!interactions_out) {
        interactions_out.clear();
        ++log_failures;
      }
    } catch (...) {
      ++log_failures;
    }
  }

  // ---- event application: the only place state changes ------------------

  Account& account(const std::string& key) { return st.accounts.at(key); }

  const Config& config_of(const Game& g) const { return st.configs.at(g.config_hash); }
  const Config& active_config() const { return st.configs.at(st.active_hash); }

  void free_slots(Game& g) {
    for (Side s = 0; s < 2; ++s) {
      if (!g.human(s)) continue;
      auto& slot = account(lower(g.players[s])).slots[g.slots[s]];
      slot = Slot{};
    }
  }

  void finish(Game& g, sim::EndReason reason, std::int64_t at) {
    g.status = GameStatus::Finished;
    g.end_reason = reason;
    g.winner = winner(g.state);
    g.ended_at = at;
    free_slots(g);
    const auto record = game_record(g);
    const auto& cfg = config_of(g);
    for (Side s = 0; s < 2; ++s) {
      if (g.human(s)) sim::record_result(account(lower(g.players[s])).record, record, s, g.state, cfg, opt.medals);
    }
    if (g.ranked() && g.winner) {
      auto& w = account(lower(g.players[*g.winner]));
      auto& l = account(lower(g.players[other(*g.winner)]));
      auto [rw, rl] = sim::elo_update(w.skill(g.season_id), l.skill(g.season_id));
      w.ratings[g.season_id] = rw;
      l.ratings[g.season_id] = rl;
    }
  }

  void apply(const json& e) {
    const auto type = e.at("type").get<std::string>();
    if (type == "season_switched") {
      auto cfg = validate_config(e.at("config"));
      st.active_hash = config_hash_hex(cfg);
      st.configs[st.active_hash] = std::move(cfg);
    } else if (type == "account_created") {
      Account a;
      a.username = e.at("username").get<std::string>();
      a.digest = e.at("digest").get<std::string>();
      a.created_at = e.at("at").get<std::int64_t>();
      a.research_consent = e.at("research_consent").get<bool>();
      a.age_over_15 = e.at("age_over_15").get<bool>();
      a.record.username = a.username;
      a.record.created_at_ms = a.created_at;
      st.accounts.emplace(lower(a.username), std::move(a));
    } else if (type == "token_issued") {
      st.tokens[e.at("token_hash").get<std::string>()] = e.at("user").get<std::string>();
    } else if (type == "queued") {
      const auto user = e.at("user").get<std::string>();
      const int slot = e.at("slot").get<int>();
      st.queue.push_back({user, slot, e.at("at").get<std::int64_t>()});
      account(user).slots[slot] = Slot{SlotKind::Queued, ""};
    } else if (type == "dequeued") {
      const auto user = e.at("user").get<std::string>();
      const int slot = e.at("slot").get<int>();
      std::erase_if(st.queue, [&](const QueueEntry& q) { return q.user == user && q.slot == slot; });
      account(user).slots[slot] = Slot{};
    } else if (type == "game_created") {
      Game g;
      g.id = e.at("game").get<std::string>();
      g.players = e.at("players").get<std::array<std::string, 2>>();
      g.slots = e.at("slots").get<std::array<int, 2>>();
      g.config_hash = st.active_hash;
      g.season_id = active_config().season_id;
      g.created_at = e.at("at").get<std::int64_t>();
      g.bot = e.at("bot").get<std::string>();
      g.coach = e.at("coach").get<bool>();
      for (Side s = 0; s < 2; ++s) {
        if (!g.human(s)) continue;
        const auto key = lower(g.players[s]);
        std::erase_if(st.queue, [&](const QueueEntry& q) { return q.user == key && q.slot == g.slots[s]; });
        account(key).slots[g.slots[s]] = Slot{SlotKind::Active, g.id};
      }
      ++st.next_game;
      st.games.emplace(g.id, std::move(g));
    } else if (type == "pair_selected") {
      auto& g = st.games.at(e.at("game").get<std::string>());
      g.pairs[e.at("side").get<int>()] = pair_from_json(e.at("pair"));
    } else if (type == "game_started") {
      auto& g = st.games.at(e.at("game").get<std::string>());
      g.first_mover = static_cast<Side>(e.at("first_mover").get<int>());
      g.state = initial_state(*g.pairs[0], *g.pairs[1], *g.first_mover, config_of(g));
      g.status = GameStatus::Active;
      g.started_at = e.at("at").get<std::int64_t>();
    } else if (type == "move_applied") {
      auto& g = st.games.at(e.at("game").get<std::string>());
      sim::MoveRecord m;
      m.side = static_cast<Side>(e.at("side").get<int>());
      m.move = move_from_json(e.at("move"));
      if (m.move.kind == MoveKind::Attack) m.actor = g.state.at(m.side, m.move.actor).id;
      m.events = events_from_json(e.at("events"));
      m.after = game_state_from_json(e.at("after"));
      m.at_ms = e.at("at").get<std::int64_t>();
      g.state = m.after;
      g.moves.push_back(std::move(m));
      if (e.contains("response")) g.responses[g.moves.size() - 1] = e.at("response");
      if (winner(g.state)) finish(g, sim::EndReason::Win, e.at("at").get<std::int64_t>());
    } else if (type == "forfeited") {
      auto& g = st.games.at(e.at("game").get<std::string>());
      const auto side = static_cast<Side>(e.at("side").get<int>());
      const auto at = e.at("at").get<std::int64_t>();
      if (g.status == GameStatus::Selecting) {
        g.status = GameStatus::Cancelled;
        g.ended_at = at;
        free_slots(g);
      } else {
        sim::MoveRecord m;
        m.side = side;
        m.move = Move::forfeit();
        m.after = forfeit_state(g.state, side);
        m.at_ms = at;
        g.state = m.after;
        g.moves.push_back(std::move(m));
        finish(g, sim::EndReason::Forfeit, at);
      }
    } else {
      throw Error(ErrorCode::SchemaViolation, "unknown event type '" + type + "'");
    }
    st.seq = e.at("seq").get<std::uint64_t>();
    st.rng = e.at("rng").get<std::uint64_t>();
  }

  // ---- views -------------------------------------------------------------

  sim::GameRecord game_record(const Game& g) const {
    sim::GameRecord r;
    r.game_id = g.id;
    r.usernames = g.players;
    r.season_id = g.season_id;
    r.config_hash = g.config_hash;
    r.pairs = {*g.pairs[0], *g.pairs[1]};
    r.first_mover = *g.first_mover;
    r.moves = g.moves;
    r.winner = g.winner;
    r.end_reason = g.end_reason;
    r.started_at_ms = g.started_at;
    r.ended_at_ms = g.status == GameStatus::Finished ? g.ended_at
                    : g.moves.empty()                 ? g.started_at
                                                      : g.moves.back().at_ms;
    return r;
  }

  std::optional<Side> side_of(const Game& g, const std::string& key) const {
    for (Side s = 0; s < 2; ++s) {
      if (g.human(s) && lower(g.players[s]) == key) return s;
    }
    return std::nullopt;
  }

  json awaiting(const Game& g, Side s) const {
    if (g.status == GameStatus::Selecting) return g.pairs[s] ? "opponent" : "me";
    if (g.status == GameStatus::Active) return g.state.active == s ? "me" : "opponent";
    return nullptr;
  }

  json game_view(const Game& g, std::optional<Side> viewer) const {
    const bool both = g.pairs[0] && g.pairs[1];
    json pairs = json::array();
    for (Side s = 0; s < 2; ++s) {
      const bool visible = both || (viewer && *viewer == s);
      pairs.push_back(visible && g.pairs[s] ? to_json(*g.pairs[s]) : json(nullptr));
    }
    json moves = json::array();
    for (std::size_t i = 0; i < g.moves.size(); ++i) {
      const auto& m = g.moves[i];
      moves.push_back({
          {"sequence", i},
          {"side", m.side},
          {"actor", m.actor ? json(std::string(name_of(*m.actor))) : json(nullptr)},
          {"move", to_json(m.move)},
          {"events", to_json(m.events)},
          {"after", to_json(m.after)},
          {"at", format_utc_ms(m.at_ms)},
      });
    }
    json legal = nullptr;
    if (viewer && g.status == GameStatus::Active && g.state.active == *viewer) {
      legal = json::array();
      for (const auto& m : legal_moves(g.state, config_of(g), MoveSet::NoForfeit)) legal.push_back(to_json(m));
    }
    const bool live = g.status == GameStatus::Active || g.status == GameStatus::Finished;
    return {
        {"id", g.id},
        {"status", to_string(g.status)},
        {"players", g.players},
        {"you", viewer ? json(*viewer) : json(nullptr)},
        {"season_id", g.season_id},
        {"config_hash", g.config_hash},
        {"bot", g.bot.empty() ? json(nullptr) : json(g.bot)},
        {"coach", g.coach},
        {"ranked", g.ranked()},
        {"pairs", pairs},
        {"awaiting_opponent_pick", viewer && g.status == GameStatus::Selecting && !g.pairs[other(*viewer)]},
        {"first_mover", opt_json(g.first_mover)},
        {"state", live ? to_json(g.state) : json(nullptr)},
        {"turn", g.status == GameStatus::Active ? json(g.players[g.state.active]) : json(nullptr)},
        {"awaiting", viewer ? awaiting(g, *viewer) : json(nullptr)},
        {"next_sequence", g.moves.size()},
        {"legal_moves", legal},
        {"moves", moves},
        {"winner", g.winner ? json(g.players[*g.winner]) : json(nullptr)},
        {"end_reason", sim::to_string(g.end_reason)},
        {"created_at", format_utc_ms(g.created_at)},
        {"started_at", g.started_at ? json(format_utc_ms(g.started_at)) : json(nullptr)},
        {"ended_at", g.ended_at ? json(format_utc_ms(g.ended_at)) : json(nullptr)},
    };
  }

  json profile(const Account& a) const {
    auto j = sim::to_json(a.record);
    j.erase("extra");
    j["skill"] = a.skill(active_config().season_id);
    j["ratings"] = a.ratings;
    return j;
  }

  json home(const Account& a) const {
    json slots = json::array();
    for (int k = 0; k < kSlotCount; ++k) {
      const auto& s = a.slots[k];
      json slot = {{"index", k}, {"state", to_string(s.kind)}, {"game_id", nullptr}, {"awaiting", nullptr}};
      if (s.kind == SlotKind::Active) {
        const auto& g = st.games.at(s.game_id);
        slot["game_id"] = g.id;
        slot["awaiting"] = awaiting(g, *side_of(g, lower(a.username)));
        slot["opponent"] = g.players[*side_of(g, lower(a.username)) == 0 ? 1 : 0];
      }
      slots.push_back(slot);
    }
    return {{"username", a.username}, {"skill", a.skill(active_config().season_id)},
            {"season_id", active_config().season_id}, {"slots", slots}};
  }

  // ---- request helpers ---------------------------------------------------

  std::string issue_token(const std::string& key) {
    std::vector<std::uint8_t> bytes;
    if (opt.seed) {
      for (int k = 0; k < 4; ++k) {
        auto v = rng.next();
        for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
      }
    } else {
      bytes = random_bytes(32);
    }
    const auto token = to_hex(bytes);
    emit({{"type", "token_issued"}, {"user", key}, {"token_hash", sha256_hex(token)}, {"at", now()}});
    return token;
  }

  Account& authenticate(const Request& r) {
    if (r.token.empty()) fail(401, "Unauthorized", "missing bearer token");
    auto it = st.tokens.find(sha256_hex(r.token));
    if (it == st.tokens.end()) fail(401, "Unauthorized", "unknown token");
    return account(it->second);
  }

  int choose_slot(const Account& a, const json& body) {
    if (body.contains("slot") && !body.at("slot").is_null()) {
      const int slot = body.at("slot").get<int>();
      if (slot < 0 || slot >= kSlotCount) fail(400, "InvalidSlot", "slot must lie in 0..4");
      if (a.slots[slot].kind != SlotKind::Empty) fail(409, "SlotBusy", "slot " + std::to_string(slot) + " is in use");
      return slot;
    }
    for (int k = 0; k < kSlotCount; ++k) {
      if (a.slots[k].kind == SlotKind::Empty) return k;
    }
    fail(409, "NoFreeSlots", a.username + " has no free game slots");
  }

  Game& game_for(const std::string& id) {
    auto it = st.games.find(id);
    if (it == st.games.end()) fail(404, "NoSuchGame", "no game " + id);
    return it->second;
  }

  Side participant(const Game& g, const Account& a) {
    auto s = side_of(g, lower(a.username));
    if (!s) fail(403, "NotParticipant", "not a player of " + g.id);
    return *s;
  }

  std::string new_game_id() const {
    char id[24];
    std::snprintf(id, sizeof id, "g%06llu", static_cast<unsigned long long>(st.next_game));
    return id;
  }

  sim::Bot& bot_for(const Game& g) {
    auto key = std::make_pair(g.bot, g.config_hash);
    auto it = bots.find(key);
    if (it == bots.end()) {
      it = bots.emplace(key, std::make_unique<sim::Bot>(sim::parse_bot_spec(g.bot), config_of(g), &store)).first;
    }
    return *it->second;
  }

  // After both picks: coin flip, then let a bot open if it won the toss.
  void maybe_start(Game& g) {
    if (!(g.pairs[0] && g.pairs[1])) return;
    if (!g.bot.empty() && sim::needs_values(sim::parse_bot_spec(g.bot))) {
      store.ensure(config_of(g), {*g.pairs[0], *g.pairs[1]});
    }
    const auto first = rng.below(2);
    emit({{"type", "game_started"}, {"game", g.id}, {"first_mover", first}, {"at", now()}});
    run_bot(g);
  }

  void run_bot(Game& g) {
    if (g.bot.empty()) return;
    auto& bot = bot_for(g);
    const solver::Matchup matchup{*g.pairs[0], *g.pairs[1]};
    while (g.status == GameStatus::Active && g.state.active == 1) {
      const Move m = bot.choose_move(g.state, matchup, rng);
      const Branch b = sample_transition(g.state, m, config_of(g), rng);
      emit({{"type", "move_applied"},
            {"game", g.id},
            {"side", 1},
            {"sequence", g.moves.size()},
            {"move", to_json(m)},
            {"events", to_json(b.events)},
            {"after", to_json(b.next)},
            {"at", now()}});
    }
  }

  // ---- endpoints ---------------------------------------------------------

  struct Ctx {
    const Request& req;
    json body;
    std::string user;
    std::string endpoint;
    std::string outcome = "ok";
  };

  Response do_register(Ctx& c) {
    const auto username = c.body.at("username").get<std::string>();
    c.user = username;
    const auto password = c.body.at("password").get<std::string>();
    const json consent = c.body.contains("consent") ? c.body.at("consent") : c.body;
    const bool research = consent.value("research_consent", false);
    const bool age = consent.value("age_over_15", false);
    if (!valid_username(username)) fail(400, "InvalidUsername", "usernames are 3-20 letters, digits, '_' or '-'");
    if (!research || !age) fail(400, "ConsentRequired", "both consent boxes must be ticked");
    if (password.size() < 6) fail(400, "InvalidPassword", "passwords need at least 6 characters");
    const auto key = lower(username);
    if (st.accounts.count(key)) fail(409, "UsernameTaken", "username '" + username + "' is taken");
    std::vector<std::uint8_t> salt;
    if (opt.seed) {
      for (int k = 0; k < 2; ++k) {
        auto v = rng.next();
        for (int b = 0; b < 8; ++b) salt.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
      }
    } else {
      salt = random_bytes(16);
    }
    emit({{"type", "account_created"},
          {"username", username},
          {"digest", hash_password(password, salt, opt.pbkdf2_iterations)},
          {"research_consent", research},
          {"age_over_15", age},
          {"at", now()}});
    const auto token = issue_token(key);
    c.outcome = "registered";
    return {201, {{"username", username}, {"token", token}, {"account", profile(account(key))}}};
  }

  Response do_login(Ctx& c) {
    const auto username = c.body.at("username").get<std::string>();
    c.user = username;
    auto it = st.accounts.find(lower(username));
    if (it == st.accounts.end() || !verify_password(c.body.at("password").get<std::string>(), it->second.digest)) {
      fail(401, "InvalidCredentials", "unknown username or wrong password");
    }
    c.user = it->second.username;
    const auto token = issue_token(it->first);
    c.outcome = "logged_in";
    return {200, {{"username", it->second.username}, {"token", token}}};
  }

  Response do_queue(Ctx& c, Account& me) {
    const int slot = choose_slot(me, c.body);
    const auto key = lower(me.username);
    auto match = std::find_if(st.queue.begin(), st.queue.end(), [&](const QueueEntry& q) { return q.user != key; });
    if (match == st.queue.end()) {
      emit({{"type", "queued"}, {"user", key}, {"slot", slot}, {"at", now()}});
      c.outcome = "queued";
      return {200, {{"slot", slot}, {"state", "queued"}, {"game_id", nullptr}}};
    }
    const auto id = new_game_id();
    const auto& opp = account(match->user);
    emit({{"type", "game_created"},
          {"game", id},
          {"players", {opp.username, me.username}},
          {"slots", {match->slot, slot}},
          {"bot", ""},
          {"coach", false},
          {"at", now()}});
    c.outcome = "matched";
    return {200, {{"slot", slot}, {"state", "active"}, {"game_id", id}}};
  }

  Response do_unqueue(Ctx& c, Account& me) {
    const int slot = c.body.at("slot").get<int>();
    if (slot < 0 || slot >= kSlotCount) fail(400, "InvalidSlot", "slot must lie in 0..4");
    if (me.slots[slot].kind != SlotKind::Queued) fail(409, "NotQueued", "slot is not queued");
    emit({{"type", "dequeued"}, {"user", lower(me.username)}, {"slot", slot}, {"at", now()}});
    c.outcome = "dequeued";
    return {200, {{"slot", slot}, {"state", "empty"}}};
  }

  Response do_challenge(Ctx& c, Account& me) {
    const auto target_name = c.body.at("username").get<std::string>();
    if (lower(target_name) == lower(me.username)) fail(400, "SelfChallenge", "cannot challenge yourself");
    auto it = st.accounts.find(lower(target_name));
    if (it == st.accounts.end()) fail(404, "NoSuchUser", "no user '" + target_name + "'");
    const int mine = choose_slot(me, c.body);
    int theirs = -1;
    for (int k = 0; k < kSlotCount && theirs < 0; ++k) {
      if (it->second.slots[k].kind == SlotKind::Empty) theirs = k;
    }
    if (theirs < 0) fail(409, "NoFreeSlots", it->second.username + " has no free game slots");
    const auto id = new_game_id();
    emit({{"type", "game_created"},
          {"game", id},
          {"players", {me.username, it->second.username}},
          {"slots", {mine, theirs}},
          {"bot", ""},
          {"coach", false},
          {"at", now()}});
    c.outcome = "challenge_created";
    return {201, game_view(st.games.at(id), 0)};
  }

  Response do_bot_game(Ctx& c, Account& me) {
    const auto text = c.body.value("bot", std::string("uniform"));
    sim::BotSpec spec;
    try {
      spec = sim::parse_bot_spec(text);
    } catch (const Error& e) {
      fail(400, "InvalidBot", e.detail());
    }
    if (spec.pair_policy == sim::PairPolicy::Argmax) fail(400, "InvalidBot", "argmax pair choice is not offered");
    if (spec.kind == sim::BotKind::EpsilonGreedy && (spec.epsilon_end || !(spec.epsilon >= 0 && spec.epsilon <= 1))) {
      fail(400, "InvalidBot", "epsilon must be a single value in [0, 1]");
    }
    if (spec.kind == sim::BotKind::Softmax && !(spec.tau > 0 && std::isfinite(spec.tau))) {
      fail(400, "InvalidBot", "temperature must be positive");
    }
    const int slot = choose_slot(me, c.body);
    const auto id = new_game_id();
    const auto canonical = sim::to_string(spec);
    emit({{"type", "game_created"},
          {"game", id},
          {"players", {me.username, "bot:" + canonical}},
          {"slots", {slot, -1}},
          {"bot", canonical},
          {"coach", c.body.value("coach", false)},
          {"at", now()}});
    auto& g = st.games.at(id);
    const Pair p = bot_for(g).choose_pair(rng);
    emit({{"type", "pair_selected"}, {"game", id}, {"side", 1}, {"pair", to_json(p)}, {"at", now()}});
    c.outcome = "bot_game_created";
    return {201, game_view(g, 0)};
  }

  Response do_get_game(Ctx& c, Game& g) {
    std::optional<Side> viewer;
    if (!c.req.token.empty()) {
      viewer = side_of(g, lower(authenticate(c.req).username));
      c.user = authenticate(c.req).username;
    }
    if (!viewer && g.status != GameStatus::Finished) fail(403, "NotParticipant", "game " + g.id + " is private");
    return {200, game_view(g, viewer)};
  }

  Response do_select_pair(Ctx& c, Account& me, Game& g) {
    const Side side = participant(g, me);
    if (g.status != GameStatus::Selecting || g.pairs[side]) fail(409, "AlreadyChosen", "pair already chosen");
    Pair p;
    try {
      const auto& j = c.body.at("pair");
      p = j.is_string() ? parse_pair(j.get<std::string>()) : pair_from_json(j);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DuplicateCharacter) fail(400, "DuplicateCharacter", "pick two different characters");
      fail(400, "BadRequest", e.detail());
    }
    emit({{"type", "pair_selected"}, {"game", g.id}, {"side", side}, {"pair", to_json(p)}, {"at", now()}});
    maybe_start(g);
    c.outcome = g.status == GameStatus::Active ? "game_started" : "pair_selected";
    return {200, game_view(g, side)};
  }

  Response do_forfeit(Ctx& c, Account& me, Game& g) {
    const Side side = participant(g, me);
    if (g.status == GameStatus::Finished || g.status == GameStatus::Cancelled) fail(409, "GameOver", "game is over");
    emit({{"type", "forfeited"}, {"game", g.id}, {"side", side}, {"at", now()}});
    c.outcome = g.status == GameStatus::Cancelled ? "game_cancelled" : "forfeited";
    return {200, game_view(g, side)};
  }

  Response do_move(Ctx& c, Account& me, Game& g) {
    const Side side = participant(g, me);
    if (g.status == GameStatus::Finished || g.status == GameStatus::Cancelled) fail(409, "GameOver", "game is over");
    if (g.status == GameStatus::Selecting) fail(409, "GameNotStarted", "both pairs must be chosen first");
    Move move;
    std::size_t seq = 0;
    try {
      move = move_from_json(c.body.at("move"));
      const auto s = c.body.at("sequence").get<long long>();
      if (s < 0) fail(400, "BadRequest", "sequence must be non-negative");
      seq = static_cast<std::size_t>(s);
    } catch (const Error& e) {
      fail(400, "BadRequest", e.detail());
    }
    if (move.kind == MoveKind::Forfeit) return do_forfeit(c, me, g);
    if (seq < g.moves.size()) {
      const auto& prior = g.moves[seq];
      auto stored = g.responses.find(seq);
      if (prior.side == side && prior.move == move && stored != g.responses.end()) {
        c.outcome = "move_replayed";
        return {200, stored->second};
      }
      fail(409, "StaleSequence", "expected sequence " + std::to_string(g.moves.size()));
    }
    if (seq > g.moves.size()) fail(409, "StaleSequence", "expected sequence " + std::to_string(g.moves.size()));
    if (g.state.active != side) fail(403, "NotYourTurn", "waiting for " + g.players[g.state.active]);
    const auto& cfg = config_of(g);
    const auto legal = legal_moves(g.state, cfg, MoveSet::NoForfeit);
    if (std::find(legal.begin(), legal.end(), move) == legal.end()) {
      fail(400, "IllegalMove", describe(move) + " is not legal here");
    }
    const Branch b = sample_transition(g.state, move, cfg, rng);
    json reply;
    emit({{"type", "move_applied"},
          {"game", g.id},
          {"side", side},
          {"sequence", seq},
          {"move", to_json(move)},
          {"events", to_json(b.events)},
          {"after", to_json(b.next)},
          {"at", now()}},
         [&](json& e) {
           reply = {{"sequence", seq},
                    {"move", to_json(move)},
                    {"events", to_json(b.events)},
                    {"after", to_json(b.next)},
                    {"game", game_view(g, side)}};
           e["response"] = reply;
           g.responses[seq] = reply;
         });
    run_bot(g);
    c.outcome = g.status == GameStatus::Finished ? "game_won" : "move_accepted";
    return {200, reply};
  }

  Response do_hint(Ctx& c, Account& me, Game& g) {
    const Side side = participant(g, me);
    if (g.bot.empty() || !g.coach) fail(403, "CoachUnavailable", "hints exist only in coached bot games");
    if (g.status == GameStatus::Selecting || g.status == GameStatus::Cancelled) {
      fail(409, "GameNotStarted", "the game has not started");
    }
    const auto& cfg = config_of(g);
    json out = {{"sequence", g.moves.size()}, {"value", nullptr}, {"best_move", nullptr},
                {"q_values", json::array()}, {"last_move", nullptr}};
    try {
      auto values = store.ensure(cfg, {*g.pairs[0], *g.pairs[1]});
      if (g.status == GameStatus::Active) {
        out["value"] = round_sig9(values.value(g.state, side));
        if (g.state.active == side) {
          out["best_move"] = to_json(values.best_move(g.state));
          for (const auto& [m, q] : values.q_values(g.state)) {
            out["q_values"].push_back({{"move", to_json(m)}, {"q", round_sig9(q)}});
          }
        }
      }
      const auto costs = sim::move_costs(game_record(g), cfg, store);
      for (auto it = costs.rbegin(); it != costs.rend(); ++it) {
        if (it->side != side) continue;
        out["last_move"] = sim::to_json(*it);
        out["last_move"]["sequence"] = it->index;
        break;
      }
    } catch (const Error& e) {
      fail(503, "HintUnavailable", std::string(to_string(e.code())) + ": " + e.detail());
    }
    c.outcome = "hint";
    return {200, out};
  }

  Response do_record(Ctx& c, Game& g) {
    if (g.status != GameStatus::Finished) {
      const auto& me = authenticate(c.req);
      c.user = me.username;
      participant(g, me);
    }
    if (!(g.pairs[0] && g.pairs[1] && g.first_mover)) fail(409, "GameNotStarted", "the game has not started");
    return {200, sim::to_json(game_record(g))};
  }

  Response do_leaderboard(Ctx& c) {
    int n = 10;
    if (auto it = c.req.query.find("n"); it != c.req.query.end()) {
      try {
        n = std::stoi(it->second);
      } catch (const std::exception&) {
        fail(400, "BadRequest", "n must be an integer");
      }
    }
    n = std::clamp(n, 1, 100);
    std::string season = active_config().season_id;
    if (auto it = c.req.query.find("season"); it != c.req.query.end()) season = it->second;
    std::vector<const Account*> all;
    for (const auto& [k, a] : st.accounts) all.push_back(&a);
    std::sort(all.begin(), all.end(), [&](const Account* a, const Account* b) {
      return std::make_tuple(-a->skill(season), a->created_at, a->username) <
             std::make_tuple(-b->skill(season), b->created_at, b->username);
    });
    json rows = json::array();
    for (std::size_t i = 0; i < all.size() && int(i) < n; ++i) {
      rows.push_back({{"rank", i + 1},
                      {"username", all[i]->username},
                      {"skill", all[i]->skill(season)},
                      {"games", all[i]->record.games},
                      {"wins", all[i]->record.wins}});
    }
    return {200, {{"season_id", season}, {"entries", rows}}};
  }

  Response do_config(Ctx& c) {
    std::string hash = st.active_hash;
    if (auto it = c.req.query.find("hash"); it != c.req.query.end()) hash = it->second;
    auto it = st.configs.find(hash);
    if (it == st.configs.end()) fail(404, "NoSuchConfig", "no config " + hash);
    return {200, {{"season_id", it->second.season_id}, {"config_hash", hash}, {"active", hash == st.active_hash},
                  {"config", to_json(it->second)}}};
  }

  Response do_switch_season(Ctx& c) {
    if (opt.admin_token.empty() || c.req.admin_token != opt.admin_token) fail(403, "Forbidden", "admin token required");
    c.user = "admin";
    Config cfg;
    try {
      cfg = validate_config(c.body.contains("config") ? c.body.at("config") : c.body);
    } catch (const Error& e) {
      fail(400, "InvalidConfig", std::string(to_string(e.code())) + ": " + e.detail());
    }
    emit({{"type", "season_switched"}, {"config", to_json(cfg)}, {"at", now()}});
    c.outcome = "season_switched";
    return {200, {{"season_id", cfg.season_id}, {"config_hash", st.active_hash}}};
  }

  Response route(Ctx& c) {
    const auto parts = split_path(c.req.path);
    const auto& m = c.req.method;
    auto ep = [&](const std::string& tmpl) { c.endpoint = m + " " + tmpl; };
    if (parts.size() < 2 || parts[0] != "v1") {
      ep(c.req.path);
      fail(404, "NotFound", "no such endpoint");
    }
    const auto& head = parts[1];
    if (!c.req.body.empty() && m != "GET") {
      try {
        c.body = json::parse(c.req.body);
      } catch (const json::exception&) {
        ep("/v1/" + head);
        fail(400, "BadRequest", "body is not JSON");
      }
      if (!c.body.is_object()) fail(400, "BadRequest", "body must be a JSON object");
    } else {
      c.body = json::object();
    }
    if (parts.size() == 2) {
      if (head == "register" && m == "POST") return ep("/v1/register"), do_register(c);
      if (head == "login" && m == "POST") return ep("/v1/login"), do_login(c);
      if (head == "leaderboard" && m == "GET") return ep("/v1/leaderboard"), do_leaderboard(c);
      if (head == "config" && m == "GET") return ep("/v1/config"), do_config(c);
      if (head == "health" && m == "GET") {
        ep("/v1/health");
        return {200, {{"status", "ok"}, {"tool", kToolName}, {"version", kVersion}, {"events", st.seq},
                      {"log_failures", log_failures}, {"season_id", active_config().season_id}}};
      }
      if (head == "bots" && m == "GET") {
        ep("/v1/bots");
        return {200, {{"kinds", {"optimal", "epsilon:<0..1>", "softmax:<tau>", "uniform", "skip"}},
                      {"pair", "append @knight,wizard for a fixed pair; uniform otherwise"}}};
      }
      if (head == "home" && m == "GET") {
        ep("/v1/home");
        auto& me = authenticate(c.req);
        c.user = me.username;
        return {200, home(me)};
      }
      if (head == "queue" && m == "POST") {
        ep("/v1/queue");
        auto& me = authenticate(c.req);
        c.user = me.username;
        return do_queue(c, me);
      }
      if (head == "challenge" && m == "POST") {
        ep("/v1/challenge");
        auto& me = authenticate(c.req);
        c.user = me.username;
        return do_challenge(c, me);
      }
      if (head == "bot-games" && m == "POST") {
        ep("/v1/bot-games");
        auto& me = authenticate(c.req);
        c.user = me.username;
        return do_bot_game(c, me);
      }
    }
    if (parts.size() == 3 && head == "queue" && parts[2] == "cancel" && m == "POST") {
      ep("/v1/queue/cancel");
      auto& me = authenticate(c.req);
      c.user = me.username;
      return do_unqueue(c, me);
    }
    if (parts.size() == 3 && head == "admin" && parts[2] == "season" && m == "POST") {
      ep("/v1/admin/season");
      return do_switch_season(c);
    }
    if (parts.size() == 3 && head == "users" && m == "GET") {
      ep("/v1/users/:username");
      auto it = st.accounts.find(lower(parts[2]));
      if (it == st.accounts.end()) fail(404, "NoSuchUser", "no user '" + parts[2] + "'");
      return {200, profile(it->second)};
    }
    if (head == "games" && parts.size() >= 3 && parts.size() <= 4) {
      const std::string sub = parts.size() == 4 ? parts[3] : "";
      ep("/v1/games/:id" + (sub.empty() ? "" : "/" + sub));
      if (sub.empty() && m == "GET") return do_get_game(c, game_for(parts[2]));
      if (sub == "record" && m == "GET") return do_record(c, game_for(parts[2]));
      const bool known = (sub == "pair" || sub == "moves" || sub == "forfeit") ? m == "POST" : sub == "hint" && m == "GET";
      if (known) {
        auto& me = authenticate(c.req);
        c.user = me.username;
        auto& g = game_for(parts[2]);
        if (sub == "pair") return do_select_pair(c, me, g);
        if (sub == "moves") return do_move(c, me, g);
        if (sub == "forfeit") return do_forfeit(c, me, g);
        return do_hint(c, me, g);
      }
    }
    if (c.endpoint.empty()) ep(c.req.path);
    fail(404, "NotFound", "no such endpoint");
  }

  Response handle(const Request& req) {
    std::lock_guard lock(mu);
    Ctx c{req, {}, {}, {}};
    Response r;
    try {
      r = route(c);
    } catch (const ApiError& e) {
      r = {e.status, {{"error", e.code}, {"message", e.message}}};
      c.outcome = e.code;
    } catch (const json::exception& e) {
      r = {400, {{"error", "BadRequest"}, {"message", e.what()}}};
      c.outcome = "BadRequest";
    } catch (const Error& e) {
      const int status = e.code() == ErrorCode::GameOver ? 409 : e.code() == ErrorCode::IllegalMove ? 400 : 500;
      r = {status, {{"error", std::string(to_string(e.code()))}, {"message", e.detail()}}};
      c.outcome = std::string(to_string(e.code()));
    } catch (const std::exception& e) {
      r = {500, {{"error", "Internal"}, {"message", e.what()}}};
      c.outcome = "Internal";
    }
    const std::int64_t at = std::max(now(), last_interaction);
    last_interaction = at;
    log_interaction({at, c.user, c.endpoint.empty() ? req.method + " " + req.path : c.endpoint, params_digest(req),
                     r.status, c.outcome});
    return r;
  }
};

GameService::GameService(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
GameService::~GameService() = default;

Response GameService::handle(const Request& request) { return impl_->handle(request); }

nlohmann::json GameService::state_json() const {
  std::lock_guard lock(impl_->mu);
  return state_to_json(impl_->st);
}

void GameService::write_snapshot() {
  std::lock_guard lock(impl_->mu);
  impl_->write_snapshot();
}

std::uint64_t GameService::event_count() const {
  std::lock_guard lock(impl_->mu);
  return impl_->st.seq;
}

std::uint64_t GameService::log_failures() const {
  std::lock_guard lock(impl_->mu);
  return impl_->log_failures;
}

}  // namespace rpglite::service
