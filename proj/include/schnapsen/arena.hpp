#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schnapsen/bots.hpp"
#include "schnapsen/stats.hpp"

namespace schnapsen {

// One cell of the tournament matrix: `player`'s record over n seeded deals
// against `opponent`, with the one-sample Z-test attached.
struct PairingResult {
  BotSpec player;
  BotSpec opponent;
  std::int64_t n = 0;
  std::int64_t wins = 0;           // deals won by `player`
  std::uint64_t seed_start = 0;    // deal i used seed_start + i
  double p_hat = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  Verdict verdict = Verdict::Equal;
};

struct MatrixMetadata {
  std::int64_t n = 0;
  std::uint64_t seed_start = 0;
  std::string timestamp;    // UTC, informational only; excluded from determinism
  std::string config_hash;  // stable hash of (players, opponents, n, seed_start)
};

// Complete cross product of players x opponents, pairings row-major
// (pairing k = row * opponents.size() + column).
struct MatrixReport {
  std::vector<BotSpec> players;
  std::vector<BotSpec> opponents;
  std::vector<PairingResult> pairings;
  MatrixMetadata meta;
};

// Plays a single deal to termination: `player` sits in seat 0, `opponent` in
// seat 1, `leader` names the seat that leads first. Returns the winning seat
// (0 = player, 1 = opponent). Bot construction failures propagate.
int play_game(const BotSpec& player, const BotSpec& opponent, std::uint64_t seed,
              int leader);

// n deals: deal i uses seed seed_start + i and `player` leads the even games.
PairingResult run_pairing(const BotSpec& player, const BotSpec& opponent,
                          std::int64_t n, std::uint64_t seed_start);

// Every (player, opponent) pairing over disjoint seed ranges: pairing k gets
// seeds [seed_start + k*n, seed_start + (k+1)*n). Games run across
// `parallelism` lanes; the report content is independent of the lane count
// (only the timestamp varies between runs).
MatrixReport run_matrix(const std::vector<BotSpec>& players,
                        const std::vector<BotSpec>& opponents, std::int64_t n,
                        std::uint64_t seed_start, int parallelism);

// `player,opponent,n,wins,p_hat,z,p_value,verdict,seed_start`; one row per
// pairing after the header. Fields containing commas are RFC 4180 quoted;
// reals use shortest round-trip formatting.
std::string export_csv(const MatrixReport& report);

// Versioned ("schema": 1) nested document; load_matrix_report inverts it.
std::string export_json(const MatrixReport& report);
MatrixReport load_matrix_report(const std::string& json_text);

// Fixed-width grid of `p_hat% (verdict)` cells, e.g. "57.2% (B)".
std::string export_heatmap(const MatrixReport& report);

}  // namespace schnapsen
