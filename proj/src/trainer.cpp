#include "schnapsen/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>
#include <utility>

#include "schnapsen/encoder.hpp"

namespace schnapsen {

namespace {

std::span<const float> as_span(const FeatureVector& x) {
  return {x.data(), x.size()};
}

}  // namespace

// ---------------------------------------------------------------------------
// ReplayBuffer
// ---------------------------------------------------------------------------

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) {
    throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  }
  slots_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::push(const ReplaySample& sample) {
  if (slots_.size() < capacity_) {
    slots_.push_back(sample);
  } else {
    slots_[next_] = sample;
    next_ = (next_ + 1) % capacity_;
  }
}

void ReplayBuffer::push_all(const ReplayDataset& samples) {
  for (const ReplaySample& s : samples) push(s);
}

const ReplaySample& ReplayBuffer::at(std::size_t index) const {
  if (index >= slots_.size()) {
    throw std::out_of_range("ReplayBuffer::at: index past the newest sample");
  }
  if (slots_.size() < capacity_) return slots_[index];
  return slots_[(next_ + index) % capacity_];
}

std::vector<ReplaySample> ReplayBuffer::sample(std::size_t k, Rng& rng) const {
  if (slots_.size() < k) {
    throw std::runtime_error(
        "ReplayBuffer::sample: warmup incomplete, buffer holds " +
        std::to_string(slots_.size()) + " of " + std::to_string(k) +
        " requested samples");
  }
  std::vector<ReplaySample> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(at(static_cast<std::size_t>(rng.next_below(slots_.size()))));
  }
  return out;
}

Batch make_batch(const std::vector<ReplaySample>& samples) {
  Batch batch;
  batch.inputs.resize(samples.size() * kNumFeatures);
  batch.targets.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::copy(samples[i].x.begin(), samples[i].x.end(),
              batch.inputs.begin() + static_cast<std::ptrdiff_t>(i * kNumFeatures));
    batch.targets[i] = static_cast<float>(samples[i].g);
  }
  return batch;
}

std::string format_log_line(const TrainingLogEntry& entry) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%lld,%.6f,%zu,%.6f,%.6f",
                static_cast<long long>(entry.games), entry.eps, entry.buffer,
                entry.loss, entry.winrate);
  return buf;
}

// ---------------------------------------------------------------------------
// Replay generation
// ---------------------------------------------------------------------------

ReplayDataset generate_replay(const BotSpec& a, const BotSpec& b,
                              std::int64_t n_games, std::uint64_t seed_start) {
  if (n_games < 0) {
    throw std::invalid_argument("generate_replay: n_games must be >= 0");
  }
  const std::unique_ptr<Bot> bots[2] = {make_bot(a), make_bot(b)};

  ReplayDataset dataset;
  std::vector<std::pair<FeatureVector, int>> records;  // (features, seat)
  for (std::int64_t game = 0; game < n_games; ++game) {
    const std::uint64_t deal_seed = seed_start + static_cast<std::uint64_t>(game);
    DealState state = new_deal(deal_seed, static_cast<int>(game % 2));
    Rng streams[2] = {Rng(mix_seed(bots[0]->seed(), deal_seed, 0)),
                      Rng(mix_seed(bots[1]->seed(), deal_seed, 1))};
    records.clear();
    while (!is_terminal(state)) {
      const int seat = state.to_move();
      const Perspective view = perspective(state, seat);
      const MoveList moves = valid_moves(state);
      const Move move = bots[seat]->choose(view, moves, streams[seat]);
      records.emplace_back(encode(view, move), seat);
      apply_move(state, move);
    }
    const int winner = outcome(state).winner;
    for (const auto& [features, seat] : records) {
      dataset.push_back(ReplaySample{features, static_cast<std::uint8_t>(seat == winner)});
    }
  }
  return dataset;
}

// ---------------------------------------------------------------------------
// Supervised imitation
// ---------------------------------------------------------------------------

SupervisedResult train_supervised(const ReplayDataset& dataset,
                                  const SupervisedConfig& cfg,
                                  std::uint64_t init_seed) {
  if (dataset.empty()) {
    throw std::invalid_argument("train_supervised: dataset is empty");
  }
  if (cfg.epochs < 1) {
    throw std::invalid_argument("train_supervised: epochs must be >= 1");
  }
  if (cfg.minibatch < 1) {
    throw std::invalid_argument("train_supervised: minibatch must be >= 1");
  }
  if (!(cfg.lr > 0.0) || !(cfg.weight_decay >= 0.0)) {
    throw std::invalid_argument("train_supervised: lr must be > 0 and weight_decay >= 0");
  }

  SupervisedResult result;
  result.model = init_mlp<float>(init_seed);
  AdamState adam = make_adam_state<float>(result.model, static_cast<float>(cfg.lr),
                                          static_cast<float>(cfg.weight_decay));

  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(cfg.shuffle_seed);

  std::vector<ReplaySample> scratch;
  std::vector<float> preds;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.minibatch)) {
      const std::size_t count = std::min(n - start, static_cast<std::size_t>(cfg.minibatch));
      scratch.clear();
      for (std::size_t i = 0; i < count; ++i) scratch.push_back(dataset[order[start + i]]);
      const Batch batch = make_batch(scratch);
      preds.resize(count);
      forward_batch(result.model, batch, std::span<float>(preds));
      loss_sum += static_cast<double>(mean_loss<float>(preds, batch.targets, LossKind::Bce)) *
                  static_cast<double>(count);
      const Mlp grads = backward(result.model, batch, LossKind::Bce);
      adam_step(result.model, grads, adam);
    }
    result.log.entries.push_back(TrainingLogEntry{
        .games = epoch, .eps = 0.0, .buffer = n, .loss = loss_sum / static_cast<double>(n),
        .winrate = 0.0});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Epsilon-greedy policies
// ---------------------------------------------------------------------------

static void check_rl_config(const RlConfig& cfg) {
  if (cfg.total_games < 1) {
    throw std::invalid_argument("RlConfig: total_games must be >= 1");
  }
  if (!(0.0 <= cfg.eps_end && cfg.eps_end <= cfg.eps_start && cfg.eps_start <= 1.0)) {
    throw std::invalid_argument("RlConfig: need 0 <= eps_end <= eps_start <= 1");
  }
  if (cfg.minibatch < 1 || static_cast<std::size_t>(cfg.minibatch) > cfg.buffer_capacity) {
    throw std::invalid_argument("RlConfig: need 1 <= minibatch <= buffer_capacity");
  }
  if (cfg.buffer_capacity == 0) {
    throw std::invalid_argument("RlConfig: buffer_capacity must be positive");
  }
  if (cfg.updates_per_game < 0) {
    throw std::invalid_argument("RlConfig: updates_per_game must be >= 0");
  }
  if (cfg.snapshot_interval < 1) {
    throw std::invalid_argument("RlConfig: snapshot_interval must be >= 1");
  }
  if (cfg.workers < 1) {
    throw std::invalid_argument("RlConfig: workers must be >= 1");
  }
  if (!(cfg.lr > 0.0) || !(cfg.weight_decay >= 0.0)) {
    throw std::invalid_argument("RlConfig: lr must be > 0 and weight_decay >= 0");
  }
}

double epsilon(std::int64_t games_played, const RlConfig& cfg) {
  check_rl_config(cfg);
  if (games_played < 0) {
    throw std::invalid_argument("epsilon: games_played must be >= 0");
  }
  const double frac = static_cast<double>(std::min(games_played, cfg.total_games)) /
                      static_cast<double>(cfg.total_games);
  return cfg.eps_start + (cfg.eps_end - cfg.eps_start) * frac;
}

Move choose_rl(const Mlp& net, const Perspective& view, const MoveList& moves,
               double eps, Rng& rng) {
  if (moves.empty()) {
    throw std::invalid_argument("choose_rl: empty move list");
  }
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("choose_rl: eps must lie in [0, 1]");
  }
  if (eps > 0.0) {
    // eps = 1 skips the gating draw entirely, so the stream usage is exactly
    // choose_rand's.
    if (eps >= 1.0 || rng.next_double() < eps) return choose_rand(moves, rng);
  }
  int best = 0;
  float best_q = -1.0f;
  for (int i = 0; i < moves.size(); ++i) {
    const FeatureVector x = encode(view, moves[i]);
    const float q = forward(net, as_span(x));
    if (q > best_q) {
      best_q = q;
      best = i;
    }
  }
  return moves[best];
}

Move choose_rl_lookahead(const Mlp& net, const Perspective& view,
                         const MoveList& moves, int depth, int num_samples,
                         Rng& rng) {
  const LeafEval leaf = [&net](const DealState& state, int me) -> double {
    if (is_terminal(state)) return outcome(state).winner == me ? 1.0 : 0.0;
    const int mover = state.to_move();
    const Perspective leaf_view = perspective(state, mover);
    const MoveList leaf_moves = valid_moves(state);
    double best_q = -1.0;
    for (const Move m : leaf_moves) {
      const FeatureVector x = encode(leaf_view, m);
      best_q = std::max(best_q, static_cast<double>(forward(net, as_span(x))));
    }
    // The network values the position for the player about to move; flip it
    // when that player is the opponent of the seat being scored.
    return mover == me ? best_q : 1.0 - best_q;
  };
  return choose_lookahead(view, moves, depth, num_samples, rng, leaf);
}

// ---------------------------------------------------------------------------
// Asynchronous Monte Carlo RL
// ---------------------------------------------------------------------------

namespace {

struct GameResult {
  std::int64_t game = 0;
  ReplayDataset samples;  // the agent's decisions, labeled with the outcome
  bool agent_won = false;
};

// Single-producer-group, single-consumer bounded queue. push blocks while the
// queue is full (backpressure; results are never dropped).
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t cap) : cap_(cap) {}

  void push(GameResult&& result) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return items_.size() < cap_ || closed_; });
    if (closed_) return;  // shutting down after a failure; drop quietly
    items_.push_back(std::move(result));
    not_empty_.notify_one();
  }

  std::optional<GameResult> pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return std::nullopt;
    GameResult out = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return out;
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<GameResult> items_;
  std::size_t cap_;
  bool closed_ = false;
};

// Versioned weight snapshots. Version v is published once the learner has
// processed exactly v * snapshot_interval games, so a worker waiting on
// version game/interval always trains against a deterministic checkpoint
// when a single worker is running.
class SnapshotBoard {
 public:
  void publish(std::shared_ptr<const Mlp> net, std::int64_t version) {
    std::lock_guard lock(mu_);
    net_ = std::move(net);
    version_ = std::max(version_, version);
    changed_.notify_all();
  }

  std::shared_ptr<const Mlp> acquire(std::int64_t min_version) {
    std::unique_lock lock(mu_);
    changed_.wait(lock, [&] { return version_ >= min_version; });
    return net_;
  }

  void poison() {
    std::lock_guard lock(mu_);
    version_ = std::numeric_limits<std::int64_t>::max();
    changed_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable changed_;
  std::shared_ptr<const Mlp> net_;
  std::int64_t version_ = -1;
};

}  // namespace

RlResult rl_train(const BotSpec& opponent, const RlConfig& cfg,
                  std::uint64_t init_seed) {
  check_rl_config(cfg);
  const std::unique_ptr<Bot> opp = make_bot(opponent);

  constexpr std::size_t kQueueCapacity = 256;
  BoundedQueue queue(kQueueCapacity);
  SnapshotBoard board;
  std::atomic<std::int64_t> next_game{0};
  std::atomic<bool> failed{false};
  std::mutex error_mu;
  std::exception_ptr first_error;

  const auto record_failure = [&] {
    {
      std::lock_guard lock(error_mu);
      if (!first_error) first_error = std::current_exception();
    }
    failed.store(true);
    queue.close();
    board.poison();
  };

  RlResult result;
  result.model = init_mlp<float>(init_seed);
  board.publish(std::make_shared<const Mlp>(result.model), 0);

  const auto worker_body = [&] {
    try {
      while (!failed.load()) {
        const std::int64_t game = next_game.fetch_add(1);
        if (game >= cfg.total_games) break;
        const std::shared_ptr<const Mlp> snapshot =
            board.acquire(game / cfg.snapshot_interval);
        if (failed.load()) break;
        const double eps = epsilon(game, cfg);
        const std::uint64_t deal_seed = cfg.base_seed + static_cast<std::uint64_t>(game);
        DealState state = new_deal(deal_seed, static_cast<int>(game % 2));
        Rng agent_rng(mix_seed(cfg.base_seed, deal_seed, 0));
        Rng opp_rng(mix_seed(opp->seed(), deal_seed, 1));

        GameResult out;
        out.game = game;
        std::vector<FeatureVector> decisions;
        while (!is_terminal(state)) {
          const int seat = state.to_move();
          const Perspective view = perspective(state, seat);
          const MoveList moves = valid_moves(state);
          Move move{};
          if (seat == 0) {
            move = choose_rl(*snapshot, view, moves, eps, agent_rng);
            decisions.push_back(encode(view, move));
          } else {
            move = opp->choose(view, moves, opp_rng);
          }
          apply_move(state, move);
        }
        out.agent_won = outcome(state).winner == 0;
        out.samples.reserve(decisions.size());
        for (const FeatureVector& x : decisions) {
          out.samples.push_back(ReplaySample{x, static_cast<std::uint8_t>(out.agent_won)});
        }
        queue.push(std::move(out));
      }
    } catch (...) {
      record_failure();
    }
  };

  const auto learner_body = [&] {
    try {
      AdamState adam = make_adam_state<float>(result.model, static_cast<float>(cfg.lr),
                                              static_cast<float>(cfg.weight_decay));
      ReplayBuffer buffer(cfg.buffer_capacity);
      Rng sample_rng(mix_seed(init_seed, 0x6c6561726eULL, 1));  // "learn"
      const std::size_t update_gate =
          std::max(cfg.warmup_samples, static_cast<std::size_t>(cfg.minibatch));

      std::int64_t processed = 0;
      double interval_loss = 0.0;
      std::int64_t interval_updates = 0;
      std::int64_t interval_wins = 0;
      std::int64_t interval_games = 0;
      std::vector<float> preds;

      while (processed < cfg.total_games) {
        std::optional<GameResult> item = queue.pop();
        if (!item) break;  // a worker failed; bail out
        buffer.push_all(item->samples);
        interval_wins += item->agent_won ? 1 : 0;
        ++interval_games;

        if (buffer.size() >= update_gate) {
          for (int u = 0; u < cfg.updates_per_game; ++u) {
            const Batch batch = make_batch(
                buffer.sample(static_cast<std::size_t>(cfg.minibatch), sample_rng));
            preds.resize(batch.targets.size());
            forward_batch(result.model, batch, std::span<float>(preds));
            interval_loss += static_cast<double>(
                mean_loss<float>(preds, batch.targets, LossKind::Mse));
            ++interval_updates;
            const Mlp grads = backward(result.model, batch, LossKind::Mse);
            adam_step(result.model, grads, adam);
          }
        }

        ++processed;
        const bool boundary = processed % cfg.snapshot_interval == 0;
        if (boundary) {
          board.publish(std::make_shared<const Mlp>(result.model),
                        processed / cfg.snapshot_interval);
        }
        if (boundary || processed == cfg.total_games) {
          result.log.entries.push_back(TrainingLogEntry{
              .games = processed,
              .eps = epsilon(processed, cfg),
              .buffer = buffer.size(),
              .loss = interval_updates > 0
                          ? interval_loss / static_cast<double>(interval_updates)
                          : 0.0,
              .winrate = interval_games > 0 ? static_cast<double>(interval_wins) /
                                                  static_cast<double>(interval_games)
                                            : 0.0});
          interval_loss = 0.0;
          interval_updates = 0;
          interval_wins = 0;
          interval_games = 0;
        }
      }
    } catch (...) {
      record_failure();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(cfg.workers) + 1);
  threads.emplace_back(learner_body);
  for (int w = 0; w < cfg.workers; ++w) threads.emplace_back(worker_body);
  for (std::thread& t : threads) t.join();

  if (first_error) std::rethrow_exception(first_error);
  return result;
}

// ---------------------------------------------------------------------------
// Model-backed bots
// ---------------------------------------------------------------------------

ModelBot::ModelBot(Mlp net, std::string kind_prefix, std::string model_ref)
    : net_(std::move(net)),
      kind_prefix_(std::move(kind_prefix)),
      model_ref_(std::move(model_ref)) {}

Move ModelBot::choose(const Perspective& view, const MoveList& moves, Rng& rng) const {
  return choose_rl(net_, view, moves, 0.0, rng);
}

std::string ModelBot::name() const { return kind_prefix_ + ":" + model_ref_; }

RlLookaheadBot::RlLookaheadBot(Mlp net, std::string model_ref, int depth,
                               int num_samples, std::uint64_t seed)
    : net_(std::move(net)),
      model_ref_(std::move(model_ref)),
      depth_(depth),
      num_samples_(num_samples),
      seed_(seed) {}

Move RlLookaheadBot::choose(const Perspective& view, const MoveList& moves,
                            Rng& rng) const {
  return choose_rl_lookahead(net_, view, moves, depth_, num_samples_, rng);
}

std::string RlLookaheadBot::name() const {
  BotSpec spec;
  spec.kind = BotSpec::Kind::RlLookahead;
  spec.model_ref = model_ref_;
  spec.depth = depth_;
  spec.num_samples = num_samples_;
  spec.seed = seed_;
  return format_bot_spec(spec);
}

}  // namespace schnapsen
