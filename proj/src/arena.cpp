#include "schnapsen/arena.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "schnapsen/engine.hpp"
#include "schnapsen/store.hpp"

namespace schnapsen {

namespace {

// One deal between two constructed bots; seats are (player = 0, opponent = 1)
// and each seat draws from its own (bot seed, deal seed, seat) stream.
int play_one(const Bot& player, const Bot& opponent, std::uint64_t deal_seed,
             int leader) {
  if (leader != 0 && leader != 1) {
    throw std::invalid_argument("play_game: leader must be seat 0 or 1");
  }
  DealState state = new_deal(deal_seed, leader);
  const Bot* bots[2] = {&player, &opponent};
  Rng streams[2] = {Rng(mix_seed(player.seed(), deal_seed, 0)),
                    Rng(mix_seed(opponent.seed(), deal_seed, 1))};
  while (!is_terminal(state)) {
    const int seat = state.to_move();
    const Perspective view = perspective(state, seat);
    const MoveList moves = valid_moves(state);
    apply_move(state, bots[seat]->choose(view, moves, streams[seat]));
  }
  return outcome(state).winner;
}

PairingResult summarize(const BotSpec& player, const BotSpec& opponent,
                        std::int64_t n, std::int64_t wins,
                        std::uint64_t seed_start) {
  PairingResult result;
  result.player = player;
  result.opponent = opponent;
  result.n = n;
  result.wins = wins;
  result.seed_start = seed_start;
  const ZResult stats = z_test(wins, n);
  result.p_hat = stats.p_hat;
  result.z = stats.z;
  result.p_value = stats.p_value;
  result.verdict = stats.verdict;
  return result;
}

std::unique_ptr<Bot> make_bot_in_pairing(const BotSpec& spec,
                                         const BotSpec& player,
                                         const BotSpec& opponent) {
  try {
    return make_bot(spec);
  } catch (const StoreError& e) {
    throw StoreError(e.code(), "pairing " + format_bot_spec(player) + " vs " +
                                   format_bot_spec(opponent) + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error("pairing " + format_bot_spec(player) + " vs " +
                             format_bot_spec(opponent) + ": " + e.what());
  }
}

std::string utc_timestamp_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Stable 32-bit hash of everything that determines the report content. The
// parallelism degree is deliberately excluded: it must not change the output.
std::string hash_config(const std::vector<BotSpec>& players,
                        const std::vector<BotSpec>& opponents, std::int64_t n,
                        std::uint64_t seed_start) {
  std::string canon = "players=";
  for (const BotSpec& s : players) canon += format_bot_spec(s) + ";";
  canon += "|opponents=";
  for (const BotSpec& s : opponents) canon += format_bot_spec(s) + ";";
  canon += "|n=" + std::to_string(n);
  canon += "|seed_start=" + std::to_string(seed_start);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", crc32(canon.data(), canon.size()));
  return buf;
}

std::string format_real(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::logic_error("format_real: to_chars failed");
  return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (const char c : s) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += '"';
  return quoted;
}

Verdict verdict_from_letter(const std::string& letter) {
  if (letter == "B") return Verdict::Better;
  if (letter == "W") return Verdict::Worse;
  if (letter == "E") return Verdict::Equal;
  throw std::invalid_argument("load_matrix_report: unknown verdict '" + letter + "'");
}

}  // namespace

int play_game(const BotSpec& player, const BotSpec& opponent, std::uint64_t seed,
              int leader) {
  const std::unique_ptr<Bot> p = make_bot(player);
  const std::unique_ptr<Bot> o = make_bot(opponent);
  return play_one(*p, *o, seed, leader);
}

PairingResult run_pairing(const BotSpec& player, const BotSpec& opponent,
                          std::int64_t n, std::uint64_t seed_start) {
  if (n < 1) throw std::invalid_argument("run_pairing: n must be >= 1");
  const std::unique_ptr<Bot> p = make_bot_in_pairing(player, player, opponent);
  const std::unique_ptr<Bot> o = make_bot_in_pairing(opponent, player, opponent);
  std::int64_t wins = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t deal_seed = seed_start + static_cast<std::uint64_t>(i);
    if (play_one(*p, *o, deal_seed, static_cast<int>(i % 2)) == 0) ++wins;
  }
  return summarize(player, opponent, n, wins, seed_start);
}

MatrixReport run_matrix(const std::vector<BotSpec>& players,
                        const std::vector<BotSpec>& opponents, std::int64_t n,
                        std::uint64_t seed_start, int parallelism) {
  if (players.empty() || opponents.empty()) {
    throw std::invalid_argument("run_matrix: player and opponent lists must be non-empty");
  }
  if (n < 1) throw std::invalid_argument("run_matrix: n must be >= 1");
  if (parallelism < 1) throw std::invalid_argument("run_matrix: parallelism must be >= 1");

  const std::size_t pairing_count = players.size() * opponents.size();

  // Bots are built up front (loud, contextual failures) and shared read-only
  // across the lanes; every decision stream is derived per deal.
  struct PairingLane {
    const BotSpec* player;
    const BotSpec* opponent;
    std::unique_ptr<Bot> p;
    std::unique_ptr<Bot> o;
    std::uint64_t seed_base;
  };
  std::vector<PairingLane> lanes;
  lanes.reserve(pairing_count);
  for (std::size_t r = 0; r < players.size(); ++r) {
    for (std::size_t c = 0; c < opponents.size(); ++c) {
      const std::size_t k = r * opponents.size() + c;
      PairingLane lane;
      lane.player = &players[r];
      lane.opponent = &opponents[c];
      lane.p = make_bot_in_pairing(players[r], players[r], opponents[c]);
      lane.o = make_bot_in_pairing(opponents[c], players[r], opponents[c]);
      lane.seed_base = seed_start + static_cast<std::uint64_t>(k) *
                                        static_cast<std::uint64_t>(n);
      lanes.push_back(std::move(lane));
    }
  }

  // Flattened game list; each entry is independent, so any lane assignment
  // produces the same wins vector.
  const std::int64_t total_games = static_cast<std::int64_t>(pairing_count) * n;
  std::vector<std::uint8_t> won(static_cast<std::size_t>(total_games), 0);
  std::string failure;
  std::mutex failure_mu;
#pragma omp parallel for schedule(dynamic, 8) num_threads(parallelism)
  for (std::int64_t idx = 0; idx < total_games; ++idx) {
    try {
      const std::size_t k = static_cast<std::size_t>(idx / n);
      const std::int64_t i = idx % n;
      const PairingLane& lane = lanes[k];
      const std::uint64_t deal_seed = lane.seed_base + static_cast<std::uint64_t>(i);
      won[static_cast<std::size_t>(idx)] = static_cast<std::uint8_t>(
          play_one(*lane.p, *lane.o, deal_seed, static_cast<int>(i % 2)) == 0);
    } catch (const std::exception& e) {
      const std::lock_guard guard(failure_mu);
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw std::runtime_error("run_matrix: " + failure);

  MatrixReport report;
  report.players = players;
  report.opponents = opponents;
  report.meta.n = n;
  report.meta.seed_start = seed_start;
  report.meta.timestamp = utc_timestamp_now();
  report.meta.config_hash = hash_config(players, opponents, n, seed_start);
  report.pairings.reserve(pairing_count);
  for (std::size_t k = 0; k < pairing_count; ++k) {
    std::int64_t wins = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      wins += won[k * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
    }
    report.pairings.push_back(summarize(*lanes[k].player, *lanes[k].opponent, n,
                                        wins, lanes[k].seed_base));
  }
  return report;
}

std::string export_csv(const MatrixReport& report) {
  std::string out = "player,opponent,n,wins,p_hat,z,p_value,verdict,seed_start\n";
  for (const PairingResult& p : report.pairings) {
    out += csv_field(format_bot_spec(p.player)) + ',';
    out += csv_field(format_bot_spec(p.opponent)) + ',';
    out += std::to_string(p.n) + ',';
    out += std::to_string(p.wins) + ',';
    out += format_real(p.p_hat) + ',';
    out += format_real(p.z) + ',';
    out += format_real(p.p_value) + ',';
    out += verdict_letter(p.verdict);
    out += ',';
    out += std::to_string(p.seed_start) + '\n';
  }
  return out;
}

std::string export_json(const MatrixReport& report) {
  nlohmann::json doc;
  doc["schema"] = 1;
  doc["metadata"] = {{"n", report.meta.n},
                     {"seed_start", report.meta.seed_start},
                     {"timestamp", report.meta.timestamp},
                     {"config_hash", report.meta.config_hash}};
  doc["players"] = nlohmann::json::array();
  for (const BotSpec& s : report.players) doc["players"].push_back(format_bot_spec(s));
  doc["opponents"] = nlohmann::json::array();
  for (const BotSpec& s : report.opponents) doc["opponents"].push_back(format_bot_spec(s));
  doc["pairings"] = nlohmann::json::array();
  for (const PairingResult& p : report.pairings) {
    doc["pairings"].push_back({{"player", format_bot_spec(p.player)},
                               {"opponent", format_bot_spec(p.opponent)},
                               {"n", p.n},
                               {"wins", p.wins},
                               {"p_hat", p.p_hat},
                               {"z", p.z},
                               {"p_value", p.p_value},
                               {"verdict", std::string(1, verdict_letter(p.verdict))},
                               {"seed_start", p.seed_start}});
  }
  return doc.dump(2) + "\n";
}

MatrixReport load_matrix_report(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("load_matrix_report: not valid JSON: ") +
                                e.what());
  }
  try {
    if (!doc.contains("schema") || doc["schema"].get<int>() != 1) {
      throw std::invalid_argument("load_matrix_report: unsupported schema");
    }
    MatrixReport report;
    report.meta.n = doc["metadata"]["n"].get<std::int64_t>();
    report.meta.seed_start = doc["metadata"]["seed_start"].get<std::uint64_t>();
    report.meta.timestamp = doc["metadata"]["timestamp"].get<std::string>();
    report.meta.config_hash = doc["metadata"]["config_hash"].get<std::string>();
    for (const auto& s : doc["players"]) {
      report.players.push_back(parse_bot_spec(s.get<std::string>()));
    }
    for (const auto& s : doc["opponents"]) {
      report.opponents.push_back(parse_bot_spec(s.get<std::string>()));
    }
    for (const auto& j : doc["pairings"]) {
      PairingResult p;
      p.player = parse_bot_spec(j["player"].get<std::string>());
      p.opponent = parse_bot_spec(j["opponent"].get<std::string>());
      p.n = j["n"].get<std::int64_t>();
      p.wins = j["wins"].get<std::int64_t>();
      p.p_hat = j["p_hat"].get<double>();
      p.z = j["z"].get<double>();
      p.p_value = j["p_value"].get<double>();
      p.verdict = verdict_from_letter(j["verdict"].get<std::string>());
      p.seed_start = j["seed_start"].get<std::uint64_t>();
      report.pairings.push_back(std::move(p));
    }
    if (report.pairings.size() != report.players.size() * report.opponents.size()) {
      throw std::invalid_argument("load_matrix_report: incomplete pairing grid");
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(
        std::string("load_matrix_report: missing or mistyped field: ") + e.what());
  }
}

std::string export_heatmap(const MatrixReport& report) {
  const std::size_t columns = report.opponents.size();
  std::vector<std::string> row_labels;
  row_labels.reserve(report.players.size());
  std::size_t label_width = 0;
  for (const BotSpec& s : report.players) {
    row_labels.push_back(format_bot_spec(s));
    label_width = std::max(label_width, row_labels.back().size());
  }
  std::vector<std::string> col_labels;
  col_labels.reserve(columns);
  std::size_t cell_width = 9;  // "100.0% (B)" is 10; "57.2% (B)" is 9
  for (const BotSpec& s : report.opponents) {
    col_labels.push_back(format_bot_spec(s));
    cell_width = std::max(cell_width, col_labels.back().size());
  }

  const auto pad = [](const std::string& s, std::size_t width) {
    return s + std::string(width > s.size() ? width - s.size() : 0, ' ');
  };

  std::string out = pad("", label_width);
  for (const std::string& label : col_labels) out += "  " + pad(label, cell_width);
  out += '\n';
  for (std::size_t r = 0; r < report.players.size(); ++r) {
    out += pad(row_labels[r], label_width);
    for (std::size_t c = 0; c < columns; ++c) {
      const PairingResult& p = report.pairings[r * columns + c];
      char cell[32];
      std::snprintf(cell, sizeof cell, "%.1f%% (%c)", p.p_hat * 100.0,
                    verdict_letter(p.verdict));
      out += "  " + pad(cell, cell_width);
    }
    out += '\n';
  }
  return out;
}

}  // namespace schnapsen
