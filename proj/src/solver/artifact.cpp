#include "rpglite/solver/artifact.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "rpglite/core/error.hpp"
#include "rpglite/core/serialize.hpp"

namespace rpglite::solver {

namespace {

constexpr char kMagic[8] = {'R', 'P', 'G', 'L', 'S', 'O', 'L', '1'};
constexpr int kFormatVersion = 1;

template <typename T>
void put_le(std::string& out, T value) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

template <typename T>
T get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) bits |= std::uint64_t(p[b]) << (8 * b);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

constexpr std::size_t kRecordSize = 8 + 8 + 8 + 2;

}  // namespace

Matchup unordered(const Matchup& m) {
  return pair_index(m.pair0) <= pair_index(m.pair1) ? m : m.swapped();
}

std::optional<std::size_t> SolvedMatchup::find(StateKey key) const {
  auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - keys.begin());
}

SolvedMatchup solve_matchup(const StateSpace& space, double tol) {
  SolvedMatchup out;
  out.matchup = space.matchup();
  out.config_hash = config_hash_hex(space.config());
  out.season_id = space.config().season_id;
  out.tolerance = tol;
  out.keys.resize(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) out.keys[i] = space.key(i);
  auto s0 = solve_minimax(space, tol, 0);
  auto s1 = solve_minimax(space, tol, 1);
  out.value[0] = std::move(s0.values.values);
  out.value[1] = std::move(s1.values.values);
  out.best.assign(space.size(), kNoMove);
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space.terminal(i)) continue;
    const auto& policy = space.mover(i) == 0 ? s0.policies[0] : s1.policies[1];
    out.best[i] = encode_move(policy.move_at(space, i));
  }
  return out;
}

void write_artifact(const std::filesystem::path& path, const SolvedMatchup& solved) {
  nlohmann::json header = {
      {"config_hash", solved.config_hash},
      {"matchup", nlohmann::json::array({to_json(solved.matchup.pair0), to_json(solved.matchup.pair1)})},
      {"season_id", solved.season_id},
      {"states", solved.keys.size()},
      {"tolerance", solved.tolerance},
      {"version", kFormatVersion},
  };
  const std::string text = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  out.reserve(out.size() + solved.keys.size() * kRecordSize);
  for (std::size_t i = 0; i < solved.keys.size(); ++i) {
    put_le<std::uint64_t>(out, solved.keys[i]);
    put_le<double>(out, solved.value[0][i]);
    put_le<double>(out, solved.value[1][i]);
    put_le<std::uint16_t>(out, solved.best[i]);
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write-then-rename so a reader never sees a partial file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::MissingArtifact, "cannot write " + tmp.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error(ErrorCode::MissingArtifact, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

SolvedMatchup read_artifact(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::MissingArtifact, path.string());
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  auto bad = [&](const std::string& why) { return Error(ErrorCode::SchemaViolation, path.string() + ": " + why); };
  if (data.size() < 12 || std::memcmp(data.data(), kMagic, 8) != 0) throw bad("bad magic");
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
  const auto header_len = get_le<std::uint32_t>(bytes + 8);
  if (data.size() < 12 + std::size_t(header_len)) throw bad("truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(data.substr(12, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw bad(e.what());
  }
  SolvedMatchup out;
  try {
    if (header.at("version").get<int>() != kFormatVersion) throw bad("unsupported version");
    out.config_hash = header.at("config_hash").get<std::string>();
    out.season_id = header.at("season_id").get<std::string>();
    out.tolerance = header.at("tolerance").get<double>();
    out.matchup = {pair_from_json(header.at("matchup").at(0)), pair_from_json(header.at("matchup").at(1))};
  } catch (const nlohmann::json::exception& e) {
    throw bad(e.what());
  }
  const std::size_t n = header.at("states").get<std::size_t>();
  const std::size_t body = 12 + header_len;
  if (data.size() != body + n * kRecordSize) throw bad("record count does not match header");
  out.keys.resize(n);
  out.value[0].resize(n);
  out.value[1].resize(n);
  out.best.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* r = bytes + body + i * kRecordSize;
    out.keys[i] = get_le<std::uint64_t>(r);
    out.value[0][i] = get_le<double>(r + 8);
    out.value[1][i] = get_le<double>(r + 16);
    out.best[i] = get_le<std::uint16_t>(r + 24);
    if (i > 0 && out.keys[i] <= out.keys[i - 1]) throw bad("keys not ascending");
  }
  return out;
}

std::size_t MatchupValues::index(const GameState& state) const {
  GameState s = flipped_ ? swapped(state) : state;
  auto i = solved_->find(state_key(s));
  if (!i) throw Error(ErrorCode::ReplayMismatch, "state not in the solved space of this matchup");
  return *i;
}

double MatchupValues::value(const GameState& state, Side side) const {
  if (auto w = winner(state)) return *w == side ? 1.0 : 0.0;
  return solved_->value[flipped_ ? other(side) : side][index(state)];
}

Move MatchupValues::best_move(const GameState& state) const {
  const auto code = solved_->best[index(state)];
  if (code == kNoMove) throw Error(ErrorCode::TerminalState, "no move at a terminal state");
  return decode_move(code);
}

double MatchupValues::q_value(const GameState& state, const Move& move) const {
  if (move.kind == MoveKind::Forfeit) return 0.0;
  const Side mover = state.active;
  double q = 0.0;
  for (const auto& b : transition_distribution(state, move, config_)) {
    q += b.probability * value(b.next, mover);
  }
  return q;
}

std::vector<std::pair<Move, double>> MatchupValues::q_values(const GameState& state) const {
  if (winner(state)) throw Error(ErrorCode::TerminalState, "no moves at a terminal state");
  std::vector<std::pair<Move, double>> out;
  for (const auto& m : legal_moves(state, config_, MoveSet::NoForfeit)) out.emplace_back(m, q_value(state, m));
  return out;
}

std::filesystem::path ArtifactStore::file_for(const std::filesystem::path& dir, const std::string& hash,
                                              const Matchup& m) {
  auto name = pair_name(m.pair0) + "_vs_" + pair_name(m.pair1) + ".rpgsol";
  std::replace(name.begin(), name.end(), ',', '-');
  return dir / hash / name;
}

std::shared_ptr<const SolvedMatchup> ArtifactStore::lookup(const std::string& hash, const Matchup& u) {
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find({hash, u}); it != cache_.end()) return it->second;
  if (dir_.empty()) return nullptr;
  auto path = file_for(dir_, hash, u);
  if (!std::filesystem::exists(path)) return nullptr;
  auto solved = std::make_shared<const SolvedMatchup>(read_artifact(path));
  if (solved->config_hash != hash || solved->matchup != u) {
    throw Error(ErrorCode::SchemaViolation, path.string() + ": header does not match its file name");
  }
  cache_[{hash, u}] = solved;
  return solved;
}

MatchupValues ArtifactStore::get(const Config& config, const Matchup& matchup) {
  const auto hash = config_hash_hex(config);
  const auto u = unordered(matchup);
  auto solved = lookup(hash, u);
  if (!solved) {
    throw Error(ErrorCode::MissingArtifact, "no solved artifact for " + pair_name(u.pair0) + " vs " +
                                                pair_name(u.pair1) + " under config " + hash);
  }
  return MatchupValues(std::move(solved), u != matchup, config);
}

MatchupValues ArtifactStore::ensure(const Config& config, const Matchup& matchup, double tol) {
  const auto hash = config_hash_hex(config);
  const auto u = unordered(matchup);
  if (!lookup(hash, u)) put(config, solve_matchup(StateSpace::enumerate(u, config), tol));
  return get(config, matchup);
}

void ArtifactStore::put(const Config& config, SolvedMatchup solved) {
  const auto hash = config_hash_hex(config);
  const auto u = solved.matchup;
  if (!dir_.empty()) write_artifact(file_for(dir_, hash, u), solved);
  std::lock_guard lock(mutex_);
  cache_[{hash, u}] = std::make_shared<const SolvedMatchup>(std::move(solved));
}

}  // namespace rpglite::solver
