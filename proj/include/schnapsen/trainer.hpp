#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schnapsen/bots.hpp"
#include "schnapsen/nn.hpp"
#include "schnapsen/replay.hpp"

namespace schnapsen {

// ---------------------------------------------------------------------------
// Replay buffer: bounded FIFO with uniform with-replacement sampling.
// ---------------------------------------------------------------------------

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 100'000);

  std::size_t size() const { return slots_.size(); }
  std::size_t capacity() const { return capacity_; }

  // Appends one sample, evicting the oldest once the capacity is reached.
  void push(const ReplaySample& sample);
  void push_all(const ReplayDataset& samples);

  // Oldest-first access (index 0 is the oldest surviving sample).
  const ReplaySample& at(std::size_t index) const;

  // k samples drawn uniformly with replacement. Throws std::runtime_error
  // mentioning "warmup incomplete" while size() < k.
  std::vector<ReplaySample> sample(std::size_t k, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;  // write cursor once the ring is full
  std::vector<ReplaySample> slots_;
};

// Flattens samples into the minibatch layout the network kernels consume.
Batch make_batch(const std::vector<ReplaySample>& samples);

// ---------------------------------------------------------------------------
// Run configurations and the shared training log.
// ---------------------------------------------------------------------------

struct RlConfig {
  std::int64_t total_games = 1'200'000;
  double eps_start = 0.23;
  double eps_end = 0.02;
  int minibatch = 1'024;
  std::size_t buffer_capacity = 100'000;
  std::size_t warmup_samples = 10'000;
  int updates_per_game = 1;
  int snapshot_interval = 256;
  int workers = 1;
  std::uint64_t base_seed = 0;
  double lr = 5e-4;
  double weight_decay = 1e-5;
};

struct SupervisedConfig {
  int epochs = 100;
  double lr = 5e-4;
  double weight_decay = 1e-5;
  int minibatch = 1'024;
  std::uint64_t shuffle_seed = 0;
};

// One record per reporting interval (per epoch for supervised runs, per
// snapshot interval for RL runs). Fields that do not apply to a run kind are
// zero: supervised runs put the epoch index in `games` and have no eps or
// winrate; RL runs before warmup have no loss.
struct TrainingLogEntry {
  std::int64_t games = 0;
  double eps = 0.0;
  std::size_t buffer = 0;
  double loss = 0.0;
  double winrate = 0.0;
};

struct TrainingLog {
  std::vector<TrainingLogEntry> entries;
};

// `games,eps,buffer,loss,winrate`
std::string format_log_line(const TrainingLogEntry& entry);

// ---------------------------------------------------------------------------
// Pipelines.
// ---------------------------------------------------------------------------

// Plays n_games deals between the two specs (a in seat 0, b in seat 1); game
// i uses deal seed seed_start+i and seat i%2 leads. Every decision by either
// player is encoded and, once the deal ends, labeled 1 if the deciding player
// won. Order is deterministic: chronological within a deal, deals in order.
ReplayDataset generate_replay(const BotSpec& a, const BotSpec& b,
                              std::int64_t n_games, std::uint64_t seed_start);

struct SupervisedResult {
  Mlp model;
  TrainingLog log;
};

// Minibatch BCE imitation with a seeded per-epoch shuffle.
SupervisedResult train_supervised(const ReplayDataset& dataset,
                                  const SupervisedConfig& cfg,
                                  std::uint64_t init_seed);

// Linear schedule: eps_start at 0 games decaying to eps_end at total_games,
// constant afterwards.
double epsilon(std::int64_t games_played, const RlConfig& cfg);

// Epsilon-greedy argmax of forward(net, encode(view, move)) over the valid
// moves, first maximum winning ties. eps = 0 never touches the rng; eps = 1
// delegates straight to choose_rand on the same stream.
Move choose_rl(const Mlp& net, const Perspective& view, const MoveList& moves,
               double eps, Rng& rng);

// choose_rdeep with the point-ratio leaf evaluator replaced by the network:
// non-terminal leaves are worth the Q-value of the leaf player's best greedy
// move (flipped to 1-q when the leaf is the opponent's turn); terminal leaves
// still count 1/0.
Move choose_rl_lookahead(const Mlp& net, const Perspective& view,
                         const MoveList& moves, int depth, int num_samples,
                         Rng& rng);

struct RlResult {
  Mlp model;
  TrainingLog log;
};

// Asynchronous Monte Carlo RL: cfg.workers producer lanes play deals against
// the opponent with epsilon-greedy exploration and ship every agent decision
// with its final outcome through a bounded queue (backpressure, no drops) to
// a single learner lane running MSE minibatch Adam updates over a FIFO
// replay buffer. Deal i uses seed base_seed+i, the agent leads even games,
// and workers refresh weight snapshots every snapshot_interval games. With
// workers=1 the whole run is bit-deterministic.
RlResult rl_train(const BotSpec& opponent, const RlConfig& cfg,
                  std::uint64_t init_seed);

// ---------------------------------------------------------------------------
// Model-backed bots.
// ---------------------------------------------------------------------------

// Greedy argmax-Q player (no exploration). `kind_prefix` distinguishes the
// supervised ("mlp") and reinforcement ("rl") flavors in the canonical name.
class ModelBot final : public Bot {
 public:
  ModelBot(Mlp net, std::string kind_prefix, std::string model_ref);
  Move choose(const Perspective& view, const MoveList& moves,
              Rng& rng) const override;
  std::string name() const override;
  const Mlp& net() const { return net_; }

 private:
  Mlp net_;
  std::string kind_prefix_;
  std::string model_ref_;
};

// Determinized lookahead with Q-valued leaves.
class RlLookaheadBot final : public Bot {
 public:
  RlLookaheadBot(Mlp net, std::string model_ref, int depth, int num_samples,
                 std::uint64_t seed);
  Move choose(const Perspective& view, const MoveList& moves,
              Rng& rng) const override;
  std::string name() const override;
  std::uint64_t seed() const override { return seed_; }

 private:
  Mlp net_;
  std::string model_ref_;
  int depth_;
  int num_samples_;
  std::uint64_t seed_;
};

}  // namespace schnapsen
