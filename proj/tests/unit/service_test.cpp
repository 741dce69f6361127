#include <gtest/gtest.h>
#include <httplib.h>

#include <filesystem>
#include <fstream>

#include "rpglite/core/serialize.hpp"
#include "rpglite/service/auth.hpp"
#include "rpglite/service/http.hpp"
#include "rpglite/service/service.hpp"
#include "rpglite/sim/analytics.hpp"
#include "rpglite/sim/dataset.hpp"
#include "test_support.hpp"

namespace rpglite::service {
namespace {

using nlohmann::json;

const Config& small() {
  static const Config c = test_support::reduced_config(season1_defaults(), 3);
  return c;
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("rpglite_service_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

ServiceOptions options_for(const std::filesystem::path& dir, std::uint64_t seed = 42) {
  ServiceOptions o;
  o.data_dir = dir;
  o.config = small();
  o.seed = seed;
  o.pbkdf2_iterations = 1000;
  o.admin_token = "admin-secret";
  auto tick = std::make_shared<std::int64_t>(1'600'000'000'000);
  o.clock = [tick] { return *tick += 1000; };
  return o;
}

struct Caller {
  GameService& svc;
  std::string token;

  Response call(const std::string& method, const std::string& path, const json& body = nullptr,
                std::map<std::string, std::string> query = {}) const {
    Request r;
    r.method = method;
    r.path = path;
    r.query = std::move(query);
    r.body = body.is_null() ? "" : body.dump();
    r.token = token;
    return svc.handle(r);
  }
};

json registration(const std::string& name, bool research = true, bool age = true) {
  return {{"username", name}, {"password", "hunter22"}, {"research_consent", research}, {"age_over_15", age}};
}

Caller signup(GameService& svc, const std::string& name) {
  Caller anon{svc, ""};
  auto r = anon.call("POST", "/v1/register", registration(name));
  EXPECT_EQ(r.status, 201) << r.body.dump();
  return Caller{svc, r.body.value("token", "")};
}

// Plays both sides with their first legal move until the game ends.
json play_out(const Caller& a, const Caller& b, const std::string& id) {
  for (int guard = 0; guard < 2000; ++guard) {
    auto view = a.call("GET", "/v1/games/" + id).body;
    if (view["status"] == "finished") return view;
    const Caller& mover = view["awaiting"] == "me" ? a : b;
    auto mine = mover.call("GET", "/v1/games/" + id).body;
    auto r = mover.call("POST", "/v1/games/" + id + "/moves",
                        {{"sequence", mine["next_sequence"]}, {"move", mine["legal_moves"][0]}});
    EXPECT_EQ(r.status, 200) << r.body.dump();
  }
  ADD_FAILURE() << "game did not finish";
  return {};
}

// Two players in a started game; returns the game id.
std::string start_game(const Caller& a, const Caller& b) {
  a.call("POST", "/v1/queue", json::object());
  auto m = b.call("POST", "/v1/queue", json::object());
  const auto id = m.body["game_id"].get<std::string>();
  a.call("POST", "/v1/games/" + id + "/pair", {{"pair", "knight,archer"}});
  b.call("POST", "/v1/games/" + id + "/pair", {{"pair", "healer,wizard"}});
  return id;
}

TEST(AuthTest, DigestRoundTrip) {
  const auto d = hash_password("secret", {1, 2, 3, 4}, 10);
  EXPECT_EQ(d.rfind("pbkdf2-sha256$10$01020304$", 0), 0u);
  EXPECT_TRUE(verify_password("secret", d));
  EXPECT_FALSE(verify_password("Secret", d));
  EXPECT_FALSE(verify_password("secret", "md5$x"));
  // RFC 7914 section 11 test vector for PBKDF2-HMAC-SHA256.
  const std::string passwd = "passwd";
  const std::vector<std::uint8_t> salt{'s', 'a', 'l', 't'};
  EXPECT_EQ(hash_password(passwd, salt, 1).substr(std::string("pbkdf2-sha256$1$73616c74$").size()),
            "55ac046e56e3089fec1691c22544b605f94185216dde0465e68b9d57c20dacbc");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ServiceTest, RegistrationRules) {
  auto dir = fresh_dir("register");
  GameService svc(options_for(dir));
  Caller anon{svc, ""};
  EXPECT_EQ(anon.call("POST", "/v1/register", registration("alice", false, true)).body["error"], "ConsentRequired");
  EXPECT_EQ(anon.call("POST", "/v1/register", registration("alice", true, false)).status, 400);
  EXPECT_EQ(anon.call("POST", "/v1/register", registration("al")).body["error"], "InvalidUsername");
  EXPECT_EQ(anon.call("POST", "/v1/register", registration("a b c")).status, 400);
  auto ok = anon.call("POST", "/v1/register", registration("Alice"));
  EXPECT_EQ(ok.status, 201);
  EXPECT_FALSE(ok.body["token"].get<std::string>().empty());
  EXPECT_EQ(ok.body["account"]["skill"], 1000);
  auto dup = anon.call("POST", "/v1/register", registration("aLICE"));
  EXPECT_EQ(dup.status, 409);
  EXPECT_EQ(dup.body["error"], "UsernameTaken");

  EXPECT_EQ(anon.call("POST", "/v1/login", {{"username", "alice"}, {"password", "nope"}}).status, 401);
  auto login = anon.call("POST", "/v1/login", {{"username", "alice"}, {"password", "hunter22"}});
  ASSERT_EQ(login.status, 200);
  Caller alice{svc, login.body["token"]};
  auto home = alice.call("GET", "/v1/home");
  ASSERT_EQ(home.status, 200);
  ASSERT_EQ(home.body["slots"].size(), 5u);
  for (const auto& s : home.body["slots"]) EXPECT_EQ(s["state"], "empty");
  const Caller stranger{svc, "bogus"};
  EXPECT_EQ(stranger.call("GET", "/v1/home").status, 401);
  EXPECT_EQ(anon.call("GET", "/v1/home").status, 401);
}

TEST(ServiceTest, QueueChallengeAndSlots) {
  auto dir = fresh_dir("slots");
  GameService svc(options_for(dir));
  auto a = signup(svc, "alice"), b = signup(svc, "bob"), c = signup(svc, "carol");

  auto q = a.call("POST", "/v1/queue", {{"slot", 2}});
  EXPECT_EQ(q.body["state"], "queued");
  EXPECT_EQ(a.call("POST", "/v1/queue", {{"slot", 2}}).body["error"], "SlotBusy");
  EXPECT_EQ(a.call("POST", "/v1/queue", {{"slot", 7}}).body["error"], "InvalidSlot");
  // The same user queued twice is never matched with itself.
  EXPECT_EQ(a.call("POST", "/v1/queue", {{"slot", 3}}).body["state"], "queued");
  auto m = b.call("POST", "/v1/queue", json::object());
  ASSERT_EQ(m.body["state"], "active");
  const auto id = m.body["game_id"].get<std::string>();
  auto ha = a.call("GET", "/v1/home").body["slots"];
  EXPECT_EQ(ha[2]["state"], "active");
  EXPECT_EQ(ha[2]["game_id"], id);
  EXPECT_EQ(ha[3]["state"], "queued");
  EXPECT_EQ(b.call("GET", "/v1/home").body["slots"][0]["game_id"], id);
  EXPECT_EQ(a.call("POST", "/v1/queue/cancel", {{"slot", 3}}).status, 200);
  EXPECT_EQ(a.call("POST", "/v1/queue/cancel", {{"slot", 3}}).body["error"], "NotQueued");

  EXPECT_EQ(a.call("POST", "/v1/challenge", {{"username", "ALICE"}}).body["error"], "SelfChallenge");
  EXPECT_EQ(a.call("POST", "/v1/challenge", {{"username", "zed"}}).body["error"], "NoSuchUser");
  // Fill carol's five slots, then a sixth challenge fails on both ends.
  for (int k = 0; k < 4; ++k) EXPECT_EQ(a.call("POST", "/v1/challenge", {{"username", "carol"}}).status, 201);
  EXPECT_EQ(b.call("POST", "/v1/challenge", {{"username", "carol"}}).status, 201);
  auto full = b.call("POST", "/v1/challenge", {{"username", "carol"}});
  EXPECT_EQ(full.status, 409);
  EXPECT_EQ(full.body["error"], "NoFreeSlots");
  auto mine = a.call("POST", "/v1/challenge", {{"username", "bob"}});
  EXPECT_EQ(mine.status, 409);
  EXPECT_EQ(mine.body["error"], "NoFreeSlots");
  EXPECT_EQ(c.call("POST", "/v1/queue", json::object()).body["error"], "NoFreeSlots");

  // Slot conservation.
  for (const auto& acc : svc.state_json()["accounts"]) {
    int used = 0;
    for (const auto& s : acc["slots"]) used += s["state"] != "empty";
    EXPECT_LE(used, 5);
  }
}

TEST(ServiceTest, PairSelectionIsHiddenUntilBothChoose) {
  auto dir = fresh_dir("pairs");
  GameService svc(options_for(dir));
  auto a = signup(svc, "alice"), b = signup(svc, "bob");
  auto id = a.call("POST", "/v1/challenge", {{"username", "bob"}}).body["id"].get<std::string>();
  EXPECT_EQ(a.call("POST", "/v1/games/" + id + "/pair", {{"pair", "knight,knight"}}).body["error"], "DuplicateCharacter");
  EXPECT_EQ(a.call("POST", "/v1/games/" + id + "/pair", {{"pair", "knight,dragon"}}).status, 400);
  auto first = a.call("POST", "/v1/games/" + id + "/pair", {{"pair", {"wizard", "knight"}}});
  ASSERT_EQ(first.status, 200);
  EXPECT_EQ(first.body["status"], "selecting");
  EXPECT_EQ(first.body["awaiting_opponent_pick"], true);
  EXPECT_EQ(a.call("POST", "/v1/games/" + id + "/pair", {{"pair", "rogue,monk"}}).body["error"], "AlreadyChosen");
  auto seen = b.call("GET", "/v1/games/" + id).body;
  EXPECT_TRUE(seen["pairs"][0].is_null());
  EXPECT_EQ(seen["awaiting"], "me");
  auto started = b.call("POST", "/v1/games/" + id + "/pair", {{"pair", "rogue,monk"}});
  EXPECT_EQ(started.body["status"], "active");
  EXPECT_FALSE(started.body["first_mover"].is_null());
  EXPECT_EQ(started.body["pairs"][0], json({"knight", "wizard"}));
  EXPECT_EQ(signup(svc, "eve").call("GET", "/v1/games/" + id).status, 403);
}

TEST(ServiceTest, MovesAreValidatedAndIdempotent) {
  auto dir = fresh_dir("moves");
  GameService svc(options_for(dir));
  auto a = signup(svc, "alice"), b = signup(svc, "bob");
  const auto id = start_game(a, b);
  auto view = a.call("GET", "/v1/games/" + id).body;
  const Caller& mover = view["awaiting"] == "me" ? a : b;
  const Caller& waiter = view["awaiting"] == "me" ? b : a;
  auto mv = mover.call("GET", "/v1/games/" + id).body;
  ASSERT_TRUE(mv["legal_moves"].is_array());
  const json move = mv["legal_moves"][0];

  EXPECT_EQ(waiter.call("POST", "/v1/games/" + id + "/moves", {{"sequence", 0}, {"move", move}}).body["error"],
            "NotYourTurn");
  EXPECT_EQ(mover.call("POST", "/v1/games/" + id + "/moves", {{"sequence", 0}, {"move", {{"kind", "attack"}, {"actor", 0}, {"targets", {5}}, {"heal", nullptr}}}}).status,
            400);
  EXPECT_EQ(mover.call("POST", "/v1/games/" + id + "/moves", {{"sequence", 3}, {"move", move}}).body["error"],
            "StaleSequence");
  auto r1 = mover.call("POST", "/v1/games/" + id + "/moves", {{"sequence", 0}, {"move", move}});
  ASSERT_EQ(r1.status, 200) << r1.body.dump();
  const auto before = svc.state_json()["rng"];
  auto r2 = mover.call("POST", "/v1/games/" + id + "/moves", {{"sequence", 0}, {"move", move}});
  EXPECT_EQ(r2.status, 200);
  EXPECT_EQ(r1.body, r2.body);
  EXPECT_EQ(svc.state_json()["rng"], before);  // no second roll
  EXPECT_EQ(mover.call("POST", "/v1/games/" + id + "/moves", {{"sequence", 0}, {"move", {{"kind", "skip"}}}}).body["error"],
            "StaleSequence");
}

TEST(ServiceTest, AttackingADeadCharacterIsIllegal) {
  auto dir = fresh_dir("dead");
  GameService svc(options_for(dir));
  auto a = signup(svc, "alice"), b = signup(svc, "bob");
  const auto id = start_game(a, b);
  // Play until some character is dead, then aim at it.
  for (int guard = 0; guard < 500; ++guard) {
    auto v = a.call("GET", "/v1/games/" + id).body;
    if (v["status"] != "active") break;
    const Caller& mover = v["awaiting"] == "me" ? a : b;
    auto mine = mover.call("GET", "/v1/games/" + id).body;
    const int me = mine["you"];
    const auto state = game_state_from_json(mine["state"]);
    for (int slot = 0; slot < 2; ++slot) {
      if (state.at(other(Side(me)), slot).hp == 0 && state.chain < 0) {
        for (int actor = 0; actor < 2; ++actor) {
          auto bad = mover.call("POST", "/v1/games/" + id + "/moves",
                                {{"sequence", mine["next_sequence"]},
                                 {"move", {{"kind", "attack"}, {"actor", actor}, {"targets", {slot}}, {"heal", nullptr}}}});
          EXPECT_EQ(bad.status, 400);
          EXPECT_EQ(bad.body["error"], "IllegalMove");
        }
        return;
      }
    }
    mover.call("POST", "/v1/games/" + id + "/moves", {{"sequence", mine["next_sequence"]}, {"move", mine["legal_moves"][0]}});
  }
  GTEST_SKIP() << "no character died before the game ended";
}

TEST(ServiceTest, FullGameBookkeeping) {
  auto dir = fresh_dir("full");
  GameService svc(options_for(dir));
  auto a = signup(svc, "alice"), b = signup(svc, "bob");
  const auto id = start_game(a, b);
  auto end = play_out(a, b, id);
  ASSERT_EQ(end["status"], "finished");
  EXPECT_EQ(end["end_reason"], "win");
  const std::string winner = end["winner"], loser = winner == "alice" ? "bob" : "alice";

  auto board = a.call("GET", "/v1/leaderboard").body["entries"];
  ASSERT_EQ(board.size(), 2u);
  EXPECT_EQ(board[0]["username"], winner);
  EXPECT_EQ(board[0]["skill"], 1016);
  EXPECT_EQ(board[1]["skill"], 984);

  auto lp = a.call("GET", "/v1/users/" + loser).body;
  EXPECT_EQ(lp["losses_to"], json({winner}));
  EXPECT_EQ(lp["games"], 1);
  auto wp = a.call("GET", "/v1/users/" + winner).body;
  EXPECT_TRUE(wp["medals"].get<std::vector<std::string>>().size() >= 1);
  int played = 0;
  for (const auto& [name, n] : wp["characters"].items()) played += n["played"].get<int>();
  EXPECT_EQ(played, 2);

  auto rec = a.call("GET", "/v1/games/" + id + "/record");
  ASSERT_EQ(rec.status, 200);
  auto record = sim::game_record_from_json(rec.body);
  EXPECT_NO_THROW(sim::replay(record, small()));
  for (const auto& s : a.call("GET", "/v1/home").body["slots"]) EXPECT_EQ(s["state"], "empty");
  EXPECT_EQ(a.call("POST", "/v1/games/" + id + "/forfeit").body["error"], "GameOver");
}

TEST(ServiceTest, NonMoverMayForfeit) {
  auto dir = fresh_dir("forfeit");
  GameService svc(options_for(dir));
  auto a = signup(svc, "alice"), b = signup(svc, "bob");
  const auto id = start_game(a, b);
  auto v = a.call("GET", "/v1/games/" + id).body;
  const Caller& waiter = v["awaiting"] == "me" ? b : a;
  const std::string quitter = waiter.call("GET", "/v1/home").body["username"];
  auto r = waiter.call("POST", "/v1/games/" + id + "/forfeit");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["end_reason"], "forfeit");
  EXPECT_NE(r.body["winner"], quitter);
  auto p = a.call("GET", "/v1/users/" + quitter).body;
  EXPECT_EQ(p["losses_to"].size(), 1u);
  EXPECT_EQ(p["skill"], 984);
  auto record = sim::game_record_from_json(a.call("GET", "/v1/games/" + id + "/record").body);
  EXPECT_NO_THROW(sim::replay(record, small()));

  // Forfeit during pair selection cancels the game without a result.
  auto id2 = a.call("POST", "/v1/challenge", {{"username", "bob"}}).body["id"].get<std::string>();
  auto c = b.call("POST", "/v1/games/" + id2 + "/forfeit");
  EXPECT_EQ(c.body["status"], "cancelled");
  EXPECT_EQ(a.call("GET", "/v1/users/bob").body["games"], 1);
}

TEST(ServiceTest, FuzzedIllegalIntentsNeverMutateState) {
  auto dir = fresh_dir("fuzz");
  GameService svc(options_for(dir));
  auto a = signup(svc, "alice"), b = signup(svc, "bob");
  const auto id = start_game(a, b);
  SplitMix64 rng(5);
  int rejected = 0;
  for (int i = 0; i < 600; ++i) {
    const Caller& who = rng.below(2) ? a : b;
    const auto view = who.call("GET", "/v1/games/" + id).body;
    if (view["status"] != "active") break;
    json move;
    switch (rng.below(4)) {
      case 0: move = {{"kind", "skip"}}; break;
      case 1:
        move = {{"kind", "attack"}, {"actor", int(rng.below(3))}, {"targets", {int(rng.below(3)) - 1}},
                {"heal", rng.below(2) ? json(nullptr) : json(int(rng.below(3)))}};
        break;
      case 2: move = {{"kind", "attack"}, {"actor", 0}, {"targets", {0, 0}}, {"heal", nullptr}}; break;
      default: move = {{"kind", "teleport"}}; break;
    }
    const long long seq = static_cast<long long>(view["next_sequence"].get<std::size_t>()) + int(rng.below(3)) - 1;
    const auto before = svc.state_json();
    auto r = who.call("POST", "/v1/games/" + id + "/moves", {{"sequence", seq}, {"move", move}});
    if (r.status != 200) {
      ++rejected;
      ASSERT_EQ(svc.state_json(), before) << r.body.dump();
    } else {
      ASSERT_NE(r.body["move"], nullptr);
    }
  }
  EXPECT_GT(rejected, 100);
}

TEST(ServiceTest, EveryRequestIsLoggedOnce) {
  auto dir = fresh_dir("log");
  GameService svc(options_for(dir));
  auto a = signup(svc, "alice"), b = signup(svc, "bob");
  Caller anon{svc, ""};
  int requests = 2;
  for (int k = 0; k < 5; ++k, ++requests) a.call("POST", "/v1/challenge", {{"username", "bob"}});
  a.call("POST", "/v1/challenge", {{"username", "bob"}});  // NoFreeSlots
  anon.call("GET", "/v1/nowhere");
  anon.call("POST", "/v1/register", registration("x"));
  a.call("POST", "/v1/queue", "not json");
  requests += 4;
  std::vector<sim::InteractionEvent> events;
  std::ifstream f(dir / "interactions.ndjson");
  std::string line;
  while (std::getline(f, line)) events.push_back(sim::interaction_from_json(json::parse(line)));
  ASSERT_EQ(events.size(), std::size_t(requests));
  for (std::size_t i = 1; i < events.size(); ++i) EXPECT_LE(events[i - 1].at_ms, events[i].at_ms);
  const auto& failed = events[2 + 5];
  EXPECT_EQ(failed.endpoint, "POST /v1/challenge");
  EXPECT_EQ(failed.result, 409);
  EXPECT_EQ(failed.outcome, "NoFreeSlots");
  EXPECT_EQ(failed.username, "alice");
  EXPECT_EQ(events[8].result, 404);
  EXPECT_EQ(svc.log_failures(), 0u);
}

TEST(ServiceTest, RestartRebuildsIdenticalState) {
  for (std::size_t every : {0u, 7u}) {
    auto dir = fresh_dir("restart" + std::to_string(every));
    auto opts = options_for(dir);
    opts.snapshot_every = every;
    json live;
    {
      GameService svc(opts);
      auto a = signup(svc, "alice"), b = signup(svc, "bob"), c = signup(svc, "carol");
      const auto id = start_game(a, b);
      play_out(a, b, id);
      c.call("POST", "/v1/queue", json::object());
      a.call("POST", "/v1/challenge", {{"username", "carol"}});
      live = svc.state_json();
    }
    {
      GameService again(opts);
      EXPECT_EQ(again.state_json(), live) << "snapshot_every=" << every;
    }
    // A torn final line is dropped on restart.
    {
      std::ofstream f(dir / "events.ndjson", std::ios::app | std::ios::binary);
      f << "{\"type\":\"queued\",\"us";
    }
    GameService torn(opts);
    EXPECT_EQ(torn.state_json(), live);
    Caller anon{torn, ""};
    EXPECT_EQ(anon.call("POST", "/v1/login", {{"username", "carol"}, {"password", "hunter22"}}).status, 200);
  }
}

TEST(ServiceTest, FixedSeedIsDeterministic) {
  json first;
  for (int run = 0; run < 2; ++run) {
    auto dir = fresh_dir("seed" + std::to_string(run));
    GameService svc(options_for(dir, 99));
    auto a = signup(svc, "alice"), b = signup(svc, "bob");
    play_out(a, b, start_game(a, b));
    if (run == 0) {
      first = svc.state_json();
    } else {
      EXPECT_EQ(svc.state_json(), first);
    }
  }
}

TEST(ServiceTest, SeasonSwitch) {
  auto dir = fresh_dir("season");
  GameService svc(options_for(dir));
  auto a = signup(svc, "alice"), b = signup(svc, "bob");
  play_out(a, b, start_game(a, b));
  auto next = test_support::reduced_config(season1_defaults(), 2);
  next.season_id = "two";
  Caller admin{svc, ""};
  EXPECT_EQ(admin.call("POST", "/v1/admin/season", to_json(next)).status, 403);
  Request r{"POST", "/v1/admin/season", {}, to_json(next).dump(), "", "admin-secret"};
  auto ok = svc.handle(r);
  ASSERT_EQ(ok.status, 200) << ok.body.dump();
  EXPECT_EQ(a.call("GET", "/v1/config").body["season_id"], "two");
  for (const auto& e : a.call("GET", "/v1/leaderboard").body["entries"]) EXPECT_EQ(e["skill"], 1000);
  auto old = a.call("GET", "/v1/leaderboard", nullptr, {{"season", small().season_id}}).body["entries"];
  EXPECT_EQ(old[0]["skill"], 1016);
  const auto id = start_game(a, b);
  EXPECT_EQ(a.call("GET", "/v1/games/" + id).body["season_id"], "two");
  auto bad = to_json(next);
  bad["knight_health"] = -1;
  r.body = bad.dump();
  EXPECT_EQ(svc.handle(r).body["error"], "InvalidConfig");
}

TEST(ServiceTest, CoachHintsInBotGames) {
  auto dir = fresh_dir("coach");
  GameService svc(options_for(dir));
  auto a = signup(svc, "alice"), b = signup(svc, "bob");
  EXPECT_EQ(a.call("POST", "/v1/bot-games", {{"bot", "greedy"}}).body["error"], "InvalidBot");
  auto g = a.call("POST", "/v1/bot-games", {{"bot", "optimal"}, {"coach", true}});
  ASSERT_EQ(g.status, 201) << g.body.dump();
  const auto id = g.body["id"].get<std::string>();
  EXPECT_TRUE(g.body["pairs"][1].is_null());
  auto v = a.call("POST", "/v1/games/" + id + "/pair", {{"pair", "knight,archer"}}).body;
  ASSERT_EQ(v["status"], "active");

  bool skipped = false, optimal = false;
  while (true) {
    v = a.call("GET", "/v1/games/" + id).body;
    if (v["status"] != "active") break;
    ASSERT_EQ(v["awaiting"], "me");  // the bot replies inside the request
    auto h = a.call("GET", "/v1/games/" + id + "/hint");
    ASSERT_EQ(h.status, 200) << h.body.dump();
    json move = h.body["best_move"];
    const double value = h.body["value"];
    bool try_skip = false;
    if (!skipped && value > 0.5) {
      for (const auto& q : h.body["q_values"]) {
        if (q["move"]["kind"] == "skip" && value - q["q"].get<double>() > 1e-3) try_skip = true;
      }
    }
    if (try_skip) move = {{"kind", "skip"}};
    auto r = a.call("POST", "/v1/games/" + id + "/moves", {{"sequence", v["next_sequence"]}, {"move", move}});
    ASSERT_EQ(r.status, 200);
    auto after = a.call("GET", "/v1/games/" + id + "/hint").body["last_move"];
    ASSERT_FALSE(after.is_null());
    if (try_skip) {
      skipped = true;
      EXPECT_GT(after["kappa"].get<double>(), 1e-3);
    } else {
      optimal = true;
      EXPECT_LT(after["kappa"].get<double>(), 1e-6);
    }
  }
  EXPECT_TRUE(optimal);

  // Costs agree with the offline analytics on the same record.
  auto record = sim::game_record_from_json(a.call("GET", "/v1/games/" + id + "/record").body);
  solver::ArtifactStore store(dir / "artifacts");
  auto costs = sim::move_costs(record, small(), store);
  auto last = a.call("GET", "/v1/games/" + id + "/hint").body["last_move"];
  for (auto it = costs.rbegin(); it != costs.rend(); ++it) {
    if (it->side == 0) {
      EXPECT_NEAR(it->kappa, last["kappa"].get<double>(), 1e-6);
      break;
    }
  }
  // Bot games are unranked.
  EXPECT_EQ(a.call("GET", "/v1/users/alice").body["skill"], 1000);

  auto human = start_game(a, b);
  EXPECT_EQ(a.call("GET", "/v1/games/" + human + "/hint").body["error"], "CoachUnavailable");
}

TEST(HttpTest, TwoClientsEndToEnd) {
  auto dir = fresh_dir("http");
  GameService svc(options_for(dir));
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  server.start();

  httplib::Client alice("127.0.0.1", port), bob("127.0.0.1", port);
  auto post = [](httplib::Client& c, const std::string& path, const json& body) {
    auto r = c.Post(path, body.dump(), "application/json");
    EXPECT_TRUE(r);
    return std::make_pair(r->status, json::parse(r->body));
  };
  auto get = [](httplib::Client& c, const std::string& path) {
    auto r = c.Get(path);
    EXPECT_TRUE(r);
    return json::parse(r->body);
  };
  EXPECT_EQ(post(alice, "/v1/register", registration("alice", false)).first, 400);
  auto [sa, ra] = post(alice, "/v1/register", registration("alice"));
  auto [sb, rb] = post(bob, "/v1/register", registration("bob"));
  ASSERT_EQ(sa, 201);
  ASSERT_EQ(sb, 201);
  alice.set_bearer_token_auth(ra["token"].get<std::string>());
  bob.set_bearer_token_auth(rb["token"].get<std::string>());
  post(alice, "/v1/queue", json::object());
  const auto id = post(bob, "/v1/queue", json::object()).second["game_id"].get<std::string>();
  post(alice, "/v1/games/" + id + "/pair", {{"pair", "knight,archer"}});
  post(bob, "/v1/games/" + id + "/pair", {{"pair", "healer,wizard"}});
  for (int guard = 0; guard < 2000; ++guard) {
    auto v = get(alice, "/v1/games/" + id);
    if (v["status"] == "finished") break;
    auto& c = v["awaiting"] == "me" ? alice : bob;
    auto mine = get(c, "/v1/games/" + id);
    ASSERT_EQ(post(c, "/v1/games/" + id + "/moves", {{"sequence", mine["next_sequence"]}, {"move", mine["legal_moves"][0]}}).first,
              200);
  }
  auto board = get(alice, "/v1/leaderboard")["entries"];
  EXPECT_EQ(board[0]["skill"], 1016);
  EXPECT_EQ(board[1]["skill"], 984);
  auto record = sim::game_record_from_json(get(bob, "/v1/games/" + id + "/record"));
  EXPECT_NO_THROW(sim::replay(record, small()));
  EXPECT_EQ(get(alice, "/v1/health")["status"], "ok");
  server.stop();
}

}  // namespace
}  // namespace rpglite::service
