#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "schnapsen/store.hpp"
#include "schnapsen/trainer.hpp"
#include "test_util.hpp"

using namespace schnapsen;
using namespace schnapsen::test;

namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "schnapsen_trainer_tests";
  fs::create_directories(dir);
  return dir / name;
}

ReplaySample tagged_sample(float tag, std::uint8_t g = 0) {
  ReplaySample s;
  s.x.fill(0.0f);
  s.x[0] = tag;
  s.g = g;
  return s;
}

Mlp zero_net() {
  Mlp net;
  net.w1.assign(static_cast<std::size_t>(kHiddenUnits) * kNumFeatures, 0.0f);
  net.b1.assign(kHiddenUnits, 0.0f);
  net.w2.assign(kHiddenUnits, 0.0f);
  net.b2 = 0.0f;
  return net;
}

// Zero weights with a bias: every input maps to sigmoid(b2).
Mlp const_net(float b2) {
  Mlp net = zero_net();
  net.b2 = b2;
  return net;
}

bool same_params(const Mlp& a, const Mlp& b) {
  return a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2;
}

bool same_log(const TrainingLog& a, const TrainingLog& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const TrainingLogEntry& x = a.entries[i];
    const TrainingLogEntry& y = b.entries[i];
    if (x.games != y.games || x.eps != y.eps || x.buffer != y.buffer ||
        x.loss != y.loss || x.winrate != y.winrate) {
      return false;
    }
  }
  return true;
}

BotSpec rand_spec(std::uint64_t seed) {
  BotSpec s;
  s.kind = BotSpec::Kind::Rand;
  s.seed = seed;
  return s;
}

// A phase-2 lead with exactly two plays and a forced reply to each: leading
// the club ace wins the trick (the leaf is our turn), leading the trump jack
// loses it (the leaf is the opponent's turn). Neither side can reach 66 in
// that first trick, so depth-2 leaves are live states whose to-move parity
// differs between the two root moves.
DealState forced_trick_state() {
  DealState s;
  s.phase = Phase::Two;
  s.trump_suit = Suit::Spades;
  s.leader = 0;
  s.hands[0] = make_set({AC, JS});
  s.hands[1] = make_set({TC, QS});
  s.captured[0] = make_set({AS, TS, KS, KC, QC, JC, JD, QD});  // 39 points
  s.captured[1] = make_set({AD, TD, KD, AH, TH, KH, QH, JH});  // 55 points
  s.direct_points = {39, 55};
  s.tricks_won = {4, 4};
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("trainer");

// ---------------------------------------------------------------------------
// Replay buffer
// ---------------------------------------------------------------------------

TEST_CASE("replay buffer is a strict FIFO ring") {
  ReplayBuffer buf(3);
  CHECK(buf.capacity() == 3);
  CHECK(buf.size() == 0);

  for (int i = 0; i < 3; ++i) buf.push(tagged_sample(static_cast<float>(i)));
  CHECK(buf.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(buf.at(static_cast<std::size_t>(i)).x[0] == i);

  // The fourth push evicts exactly the oldest sample.
  buf.push(tagged_sample(3.0f));
  CHECK(buf.size() == 3);
  CHECK(buf.at(0).x[0] == 1.0f);
  CHECK(buf.at(1).x[0] == 2.0f);
  CHECK(buf.at(2).x[0] == 3.0f);

  // Two more wraps keep the order oldest-first.
  buf.push(tagged_sample(4.0f));
  buf.push(tagged_sample(5.0f));
  CHECK(buf.at(0).x[0] == 3.0f);
  CHECK(buf.at(2).x[0] == 5.0f);

  CHECK_THROWS_AS(buf.at(3), std::out_of_range);
  CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
}

TEST_CASE("replay buffer holds the newest 100,000 of 100,001 pushes") {
  ReplayBuffer buf;  // default capacity
  CHECK(buf.capacity() == 100'000);
  for (int i = 0; i <= 100'000; ++i) buf.push(tagged_sample(static_cast<float>(i)));
  CHECK(buf.size() == 100'000);
  // Sample 0 is gone; the survivors are 1..100,000 oldest-first.
  CHECK(buf.at(0).x[0] == 1.0f);
  CHECK(buf.at(99'999).x[0] == 100'000.0f);
  CHECK(buf.at(49'999).x[0] == 50'000.0f);
}

TEST_CASE("buffer sampling is uniform, with replacement, and gated on warmup") {
  ReplayBuffer buf(10);
  Rng rng(2024);

  for (int i = 0; i < 5; ++i) buf.push(tagged_sample(static_cast<float>(i)));
  const std::string message =
      thrown_message([&] { (void)buf.sample(6, rng); });
  CHECK(mentions(message, "warmup incomplete"));
  CHECK_THROWS_AS((void)buf.sample(6, rng), std::runtime_error);

  for (int i = 5; i < 10; ++i) buf.push(tagged_sample(static_cast<float>(i)));

  // 10,000 draws of k = 10 = 100,000 total draws over ten elements.
  std::array<long, 10> freq{};
  bool saw_duplicate = false;
  for (int call = 0; call < 10'000; ++call) {
    const std::vector<ReplaySample> drawn = buf.sample(10, rng);
    REQUIRE(drawn.size() == 10);
    std::array<int, 10> in_call{};
    for (const ReplaySample& s : drawn) {
      const int tag = static_cast<int>(s.x[0]);
      REQUIRE(tag >= 0);
      REQUIRE(tag < 10);
      ++freq[static_cast<std::size_t>(tag)];
      if (++in_call[static_cast<std::size_t>(tag)] > 1) saw_duplicate = true;
    }
  }
  // Binomial(100,000, 0.1): mean 10,000, sigma ~94.9; allow 4 sigma.
  for (long n : freq) {
    CHECK(n > 9'620);
    CHECK(n < 10'380);
  }
  // Without replacement a k = size draw would be a permutation every time.
  CHECK(saw_duplicate);

  // k = 0 is a valid no-op.
  CHECK(buf.sample(0, rng).empty());
}

TEST_CASE("make_batch flattens samples row-major; log lines are csv") {
  ReplaySample a = tagged_sample(0.25f, 1);
  a.x[172] = 1.0f;
  ReplaySample b = tagged_sample(0.75f, 0);
  const Batch batch = make_batch({a, b});
  CHECK(batch.size() == 2);
  CHECK(batch.inputs.size() == 2 * kNumFeatures);
  CHECK(batch.inputs[0] == 0.25f);
  CHECK(batch.inputs[172] == 1.0f);
  CHECK(batch.inputs[kNumFeatures + 0] == 0.75f);
  CHECK(batch.inputs[kNumFeatures + 172] == 0.0f);
  CHECK(batch.targets[0] == 1.0f);
  CHECK(batch.targets[1] == 0.0f);

  const TrainingLogEntry entry{.games = 256, .eps = 0.2255, .buffer = 3000,
                               .loss = 0.125, .winrate = 0.55};
  CHECK(format_log_line(entry) == "256,0.225500,3000,0.125000,0.550000");
}

// ---------------------------------------------------------------------------
// Exploration schedule
// ---------------------------------------------------------------------------

TEST_CASE("epsilon decays linearly from 0.23 to 0.02 and then holds") {
  const RlConfig cfg;  // stock defaults: 1.2M games, 0.23 -> 0.02
  CHECK(epsilon(0, cfg) == 0.23);
  CHECK(epsilon(600'000, cfg) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(epsilon(1'200'000, cfg) == doctest::Approx(0.02).epsilon(1e-12));
  // Constant once the schedule is exhausted.
  CHECK(epsilon(2'000'000, cfg) == epsilon(1'200'000, cfg));
  CHECK(epsilon(1'200'001, cfg) == epsilon(1'200'000, cfg));

  double prev = epsilon(0, cfg);
  for (std::int64_t g = 10'000; g <= 1'300'000; g += 10'000) {
    const double e = epsilon(g, cfg);
    CHECK(e <= prev + 1e-15);
    CHECK(e >= cfg.eps_end - 1e-15);
    CHECK(e <= cfg.eps_start + 1e-15);
    prev = e;
  }

  CHECK_THROWS_AS(epsilon(-1, cfg), std::invalid_argument);

  RlConfig crossed = cfg;
  crossed.eps_end = 0.5;  // above eps_start
  CHECK_THROWS_AS(epsilon(0, crossed), std::invalid_argument);
  RlConfig empty = cfg;
  empty.total_games = 0;
  CHECK_THROWS_AS(epsilon(0, empty), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Replay generation
// ---------------------------------------------------------------------------

TEST_CASE("generate_replay matches a hand-rolled replay of the same games") {
  const BotSpec a = rand_spec(11);
  const BotSpec b = rand_spec(22);
  constexpr std::int64_t kGames = 1'000;
  constexpr std::uint64_t kSeedStart = 5'000;

  const ReplayDataset dataset = generate_replay(a, b, kGames, kSeedStart);
  CHECK(dataset == generate_replay(a, b, kGames, kSeedStart));  // deterministic

  // Independent oracle: replay every game with the documented conventions and
  // compare the dataset slice by slice.
  std::size_t cursor = 0;
  std::size_t shortest = 1'000, longest = 0;
  for (std::int64_t game = 0; game < kGames; ++game) {
    const std::uint64_t deal_seed = kSeedStart + static_cast<std::uint64_t>(game);
    DealState state = new_deal(deal_seed, static_cast<int>(game % 2));
    Rng streams[2] = {Rng(mix_seed(11, deal_seed, 0)), Rng(mix_seed(22, deal_seed, 1))};
    std::vector<std::pair<FeatureVector, int>> decisions;
    while (!is_terminal(state)) {
      const int seat = state.to_move();
      const Perspective view = perspective(state, seat);
      const MoveList moves = valid_moves(state);
      const Move move = choose_rand(moves, streams[seat]);
      decisions.emplace_back(encode(view, move), seat);
      apply_move_unchecked(state, move);
    }
    const int winner = outcome(state).winner;

    // Every deal contributes a bounded, fully labeled block. The floor is 3
    // (a won trick, then a trump-marriage declaration crossing 66 ends a deal
    // on the third decision); the ceiling is 21 (20 card plays plus at most
    // one trump exchange, since marriage leads are themselves plays).
    REQUIRE(decisions.size() >= 3);
    REQUIRE(decisions.size() <= 21);
    shortest = std::min(shortest, decisions.size());
    longest = std::max(longest, decisions.size());
    REQUIRE(cursor + decisions.size() <= dataset.size());
    for (const auto& [features, seat] : decisions) {
      const ReplaySample& got = dataset[cursor++];
      REQUIRE(got.x == features);
      REQUIRE(got.g == (seat == winner ? 1 : 0));
    }
  }
  CHECK(cursor == dataset.size());
  // Frozen extremes for this window: seed 5002 ends after two marriage-led
  // tricks; several deals run the full 20 plays plus an exchange.
  CHECK(shortest == 4);
  CHECK(longest == 21);
}

TEST_CASE("generate_replay edge cases") {
  CHECK(generate_replay(rand_spec(1), rand_spec(2), 0, 0).empty());
  CHECK_THROWS_AS(generate_replay(rand_spec(1), rand_spec(2), -1, 0),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Supervised imitation
// ---------------------------------------------------------------------------

TEST_CASE("train_supervised starts near ln 2 and reduces the loss") {
  // ~15 samples per deal: 900 deals clear the >= 10,000-sample bar.
  const ReplayDataset dataset = generate_replay(rand_spec(3), rand_spec(4), 900, 900);
  REQUIRE(dataset.size() >= 10'000);

  SupervisedConfig cfg;
  cfg.epochs = 3;
  cfg.shuffle_seed = 17;
  const SupervisedResult run = train_supervised(dataset, cfg, 42);

  REQUIRE(run.log.entries.size() == 3);
  // Fresh-init predictions sit near 0.5, so the first epoch's mean BCE is
  // close to ln 2.
  const double ln2 = std::log(2.0);
  CHECK(run.log.entries[0].loss > ln2 - 0.15);
  CHECK(run.log.entries[0].loss < ln2 + 0.15);
  CHECK(run.log.entries[2].loss < run.log.entries[0].loss);
  for (int epoch = 0; epoch < 3; ++epoch) {
    const TrainingLogEntry& e = run.log.entries[static_cast<std::size_t>(epoch)];
    CHECK(e.games == epoch);
    CHECK(e.eps == 0.0);
    CHECK(e.buffer == dataset.size());
    CHECK(e.winrate == 0.0);
  }

  // Bit-reproducible from (dataset, cfg, seed).
  const SupervisedResult again = train_supervised(dataset, cfg, 42);
  CHECK(same_params(run.model, again.model));
  CHECK(same_log(run.log, again.log));

  SupervisedConfig bad = cfg;
  bad.epochs = 0;
  CHECK_THROWS_AS(train_supervised(dataset, bad, 42), std::invalid_argument);
  CHECK_THROWS_AS(train_supervised(ReplayDataset{}, cfg, 42), std::invalid_argument);
  SupervisedConfig tiny = cfg;
  tiny.minibatch = 0;
  CHECK_THROWS_AS(train_supervised(dataset, tiny, 42), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Epsilon-greedy action selection
// ---------------------------------------------------------------------------

TEST_CASE("choose_rl at eps = 1 is choose_rand on the same stream") {
  const Mlp net = init_mlp<float>(7);
  Rng greedy_stream(42), rand_stream(42), play_rng(1);
  int decisions = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    DealState state = new_deal(seed, static_cast<int>(seed % 2));
    while (!is_terminal(state)) {
      const int seat = state.to_move();
      const Perspective view = perspective(state, seat);
      const MoveList moves = valid_moves(state);
      CHECK(choose_rl(net, view, moves, 1.0, greedy_stream) ==
            choose_rand(moves, rand_stream));
      ++decisions;
      apply_move_unchecked(state, moves[static_cast<int>(play_rng.next_below(
                                      static_cast<std::uint64_t>(moves.size())))]);
    }
  }
  CHECK(decisions > 50);
  // Identical choices AND identical stream consumption throughout.
  CHECK(greedy_stream.next_u64() == rand_stream.next_u64());
}

TEST_CASE("choose_rl at eps = 0 is a pure argmax that never draws") {
  DealState state = new_deal(42, 0);  // five plain plays, all cards distinct
  const Perspective view = perspective(state, 0);
  const MoveList moves = valid_moves(state);
  REQUIRE(moves.size() == 5);

  // All-equal outputs fall back to the first move.
  Rng rng(9);
  const std::uint64_t probe = Rng(9).next_u64();
  CHECK(choose_rl(zero_net(), view, moves, 0.0, rng) == moves[0]);
  CHECK(rng.next_u64() == probe);  // untouched stream

  // A net keyed to one move's card (through the move one-hot block) must pick
  // exactly that move.
  for (int target = 0; target < moves.size(); ++target) {
    Mlp net = zero_net();
    net.w1[static_cast<std::size_t>(153 + moves[target].card.index())] = 1.0f;
    net.w2[0] = 1.0f;
    Rng r(1);
    CHECK(choose_rl(net, view, moves, 0.0, r) == moves[target]);
  }

  // Shifting the output bias rescales every Q the same way: argmax invariant.
  Mlp net = init_mlp<float>(3);
  Rng r1(1), r2(1), play_rng(77);
  int checked = 0;
  for (std::uint64_t seed = 50; seed < 55; ++seed) {
    DealState s = new_deal(seed, 0);
    while (!is_terminal(s)) {
      const int seat = s.to_move();
      const Perspective v = perspective(s, seat);
      const MoveList m = valid_moves(s);
      Mlp shifted = net;
      shifted.b2 += 1.7f;
      CHECK(choose_rl(net, v, m, 0.0, r1) == choose_rl(shifted, v, m, 0.0, r2));
      ++checked;
      apply_move_unchecked(s, m[static_cast<int>(play_rng.next_below(
                                  static_cast<std::uint64_t>(m.size())))]);
    }
  }
  CHECK(checked > 50);

  Rng r3(2);
  CHECK_THROWS_AS(choose_rl(net, view, MoveList{}, 0.0, r3), std::invalid_argument);
  CHECK_THROWS_AS(choose_rl(net, view, moves, -0.1, r3), std::invalid_argument);
  CHECK_THROWS_AS(choose_rl(net, view, moves, 1.5, r3), std::invalid_argument);
}

TEST_CASE("choose_rl explores at the configured rate") {
  DealState state = new_deal(42, 0);
  const Perspective view = perspective(state, 0);
  const MoveList moves = valid_moves(state);
  REQUIRE(moves.size() == 5);

  Mlp net = zero_net();
  net.w1[static_cast<std::size_t>(153 + moves[2].card.index())] = 1.0f;
  net.w2[0] = 1.0f;  // greedy pick is moves[2]

  Rng rng(31337);
  int greedy = 0;
  constexpr int kTrials = 4'000;
  for (int i = 0; i < kTrials; ++i) {
    if (choose_rl(net, view, moves, 0.5, rng) == moves[2]) ++greedy;
  }
  // P(greedy) = 0.5 + 0.5/5 = 0.6; sigma = sqrt(0.6 * 0.4 / 4000) ~ 0.0077.
  const double rate = static_cast<double>(greedy) / kTrials;
  CHECK(rate > 0.6 - 4 * 0.0078);
  CHECK(rate < 0.6 + 4 * 0.0078);
}

// ---------------------------------------------------------------------------
// Lookahead with learned leaves
// ---------------------------------------------------------------------------

TEST_CASE("choose_rl_lookahead keeps the terminal 1/0 override") {
  // Declaring the trump marriage ends the deal at once (worth exactly 1.0),
  // which beats any sigmoid leaf no matter what the network says.
  DealState s;
  s.phase = Phase::Two;
  s.trump_suit = Suit::Spades;
  s.leader = 0;
  s.hands[0] = make_set({KS, QS, JD});
  s.hands[1] = make_set({AS, TS, AD});
  s.captured[0] = make_set({AC, TC, KC, QC, JC, TD, KD, QD});
  s.captured[1] = make_set({AH, TH, KH, QH, JH, JS});
  s.tricks_won = {4, 3};
  s.direct_points = {55, 30};

  const Perspective view = perspective(s, 0);
  const MoveList moves = valid_moves(s);
  REQUIRE(moves[3] == Move{MoveKind::Marriage, KS});

  Rng rng(8);
  for (const Mlp& net : {init_mlp<float>(0), const_net(6.0f), const_net(-6.0f)}) {
    for (int depth : {1, 3}) {
      for (int samples : {1, 4}) {
        CHECK(choose_rl_lookahead(net, view, moves, depth, samples, rng) ==
              Move{MoveKind::Marriage, KS});
      }
    }
  }
}

TEST_CASE("choose_rl_lookahead scores leaves for the seat being evaluated") {
  const DealState s = forced_trick_state();
  const Perspective view = perspective(s, 0);
  const MoveList moves = valid_moves(s);
  REQUIRE(moves.size() == 2);
  REQUIRE(moves[0] == Move{MoveKind::PlayCard, AC});
  REQUIRE(moves[1] == Move{MoveKind::PlayCard, JS});

  // Both replies are forced, so the depth-2 leaves are exact: leading the ace
  // wins the trick and leaves us on lead; leading the trump jack loses it.
  {
    DealState lead_ace = s;
    apply_move(lead_ace, moves[0]);
    REQUIRE(valid_moves(lead_ace).size() == 1);
    DealState lead_jack = s;
    apply_move(lead_jack, moves[1]);
    REQUIRE(valid_moves(lead_jack).size() == 1);
  }

  // A pessimistic net (every Q near 0) prefers the leaf where the *opponent*
  // is to move, because that value flips to 1 - q. A net without the flip
  // would see identical scores everywhere and fall back to the first move.
  Rng rng(4);
  CHECK(choose_rl_lookahead(const_net(-6.0f), view, moves, 2, 1, rng) ==
        Move{MoveKind::PlayCard, JS});
  // An optimistic net prefers keeping the lead.
  CHECK(choose_rl_lookahead(const_net(6.0f), view, moves, 2, 1, rng) ==
        Move{MoveKind::PlayCard, AC});
  // Indifferent net: every leaf is worth exactly 0.5, first max wins.
  CHECK(choose_rl_lookahead(zero_net(), view, moves, 2, 1, rng) ==
        Move{MoveKind::PlayCard, AC});
  // The point-ratio heuristic also keeps the lead here (60/115 vs 39/99).
  CHECK(choose_rdeep(view, moves, 2, 1, rng) == Move{MoveKind::PlayCard, AC});
}

TEST_CASE("swapping the heuristic back into the lookahead reproduces choose_rdeep") {
  const LeafEval heuristic = [](const DealState& leaf, int me) {
    return evaluate_state(leaf, me);
  };
  Rng play_rng(64);
  int points = 0;
  for (std::uint64_t seed = 200; seed < 330; ++seed) {
    DealState state = new_deal(seed, static_cast<int>(seed % 2));
    int ply = 0;
    while (!is_terminal(state)) {
      const int seat = state.to_move();
      const MoveList moves = valid_moves(state);
      if (ply % 7 == 0) {
        const Perspective v = perspective(state, seat);
        const std::uint64_t stream_seed = mix_seed(seed, static_cast<std::uint64_t>(ply));
        Rng r1(stream_seed), r2(stream_seed);
        CHECK(choose_lookahead(v, moves, 2, 2, r1, heuristic) ==
              choose_rdeep(v, moves, 2, 2, r2));
        CHECK(r1.next_u64() == r2.next_u64());  // same draw consumption
        ++points;
      }
      ++ply;
      apply_move_unchecked(state, moves[static_cast<int>(play_rng.next_below(
                                      static_cast<std::uint64_t>(moves.size())))]);
    }
  }
  CHECK(points >= 300);
}

// ---------------------------------------------------------------------------
// Reinforcement learning loop
// ---------------------------------------------------------------------------

TEST_CASE("rl_train with one worker is bit-deterministic and fully logged") {
  RlConfig cfg;
  cfg.total_games = 60;
  cfg.minibatch = 32;
  cfg.buffer_capacity = 512;
  cfg.warmup_samples = 64;
  cfg.snapshot_interval = 16;
  cfg.workers = 1;
  cfg.base_seed = 77;

  const RlResult first = rl_train(rand_spec(5), cfg, 9);
  const RlResult second = rl_train(rand_spec(5), cfg, 9);
  CHECK(same_params(first.model, second.model));
  CHECK(same_log(first.log, second.log));

  // Boundary records at 16, 32, 48 plus the final 60.
  REQUIRE(first.log.entries.size() == 4);
  const std::int64_t expected_games[] = {16, 32, 48, 60};
  for (std::size_t i = 0; i < 4; ++i) {
    const TrainingLogEntry& e = first.log.entries[i];
    CHECK(e.games == expected_games[i]);
    CHECK(e.eps == epsilon(e.games, cfg));
    CHECK(e.buffer > 0);
    CHECK(e.buffer <= cfg.buffer_capacity);
    CHECK(e.winrate >= 0.0);
    CHECK(e.winrate <= 1.0);
    CHECK(e.loss >= 0.0);
    // Warmup (64 samples ~ 6 games) completes inside the first interval.
    CHECK(e.loss > 0.0);
    CHECK(std::isfinite(e.loss));
  }
  // Buffer only grows at this scale (well under capacity).
  CHECK(first.log.entries[3].buffer > first.log.entries[0].buffer);

  // The training loop actually moved the weights.
  CHECK_FALSE(same_params(first.model, init_mlp<float>(9)));

  // With updates disabled the model must come back exactly at its init.
  RlConfig frozen = cfg;
  frozen.updates_per_game = 0;
  const RlResult untouched = rl_train(rand_spec(5), frozen, 9);
  CHECK(same_params(untouched.model, init_mlp<float>(9)));
  CHECK(untouched.log.entries.size() == 4);
  CHECK(untouched.log.entries[3].games == 60);
  CHECK(untouched.log.entries[0].loss == 0.0);
}

TEST_CASE("rl_train with several workers still plays every game exactly once") {
  RlConfig cfg;
  cfg.total_games = 40;
  cfg.minibatch = 16;
  cfg.buffer_capacity = 256;
  cfg.warmup_samples = 32;
  cfg.snapshot_interval = 8;
  cfg.workers = 3;
  cfg.base_seed = 123;

  const RlResult run = rl_train(rand_spec(6), cfg, 21);
  REQUIRE(run.log.entries.size() == 5);
  CHECK(run.log.entries.back().games == 40);
  std::int64_t total_counted = 0;
  std::int64_t prev = 0;
  for (const TrainingLogEntry& e : run.log.entries) {
    CHECK(e.games > prev);  // strictly monotone counter
    total_counted = e.games;
    prev = e.games;
    CHECK(std::isfinite(e.loss));
  }
  CHECK(total_counted == cfg.total_games);
  for (float w : run.model.w2) REQUIRE(std::isfinite(w));
}

TEST_CASE("rl_train validates its configuration and its opponent") {
  RlConfig cfg;
  cfg.total_games = 10;
  cfg.minibatch = 8;
  cfg.buffer_capacity = 64;
  cfg.warmup_samples = 8;

  RlConfig bad = cfg;
  bad.eps_end = 0.9;  // above eps_start
  CHECK_THROWS_AS(rl_train(rand_spec(1), bad, 0), std::invalid_argument);
  bad = cfg;
  bad.minibatch = 128;  // above buffer_capacity
  CHECK_THROWS_AS(rl_train(rand_spec(1), bad, 0), std::invalid_argument);
  bad = cfg;
  bad.workers = 0;
  CHECK_THROWS_AS(rl_train(rand_spec(1), bad, 0), std::invalid_argument);
  bad = cfg;
  bad.snapshot_interval = 0;
  CHECK_THROWS_AS(rl_train(rand_spec(1), bad, 0), std::invalid_argument);
  bad = cfg;
  bad.total_games = 0;
  CHECK_THROWS_AS(rl_train(rand_spec(1), bad, 0), std::invalid_argument);

  // A model-backed opponent whose checkpoint is missing fails up front.
  BotSpec ghost;
  ghost.kind = BotSpec::Kind::Mlp;
  ghost.model_ref = (temp_file("missing_model.bin")).string();
  CHECK_THROWS_AS(rl_train(ghost, cfg, 0), StoreError);
}

// ---------------------------------------------------------------------------
// Model-backed bots and the factory
// ---------------------------------------------------------------------------

TEST_CASE("model bots load checkpoints, act greedily, and name themselves") {
  const fs::path path = temp_file("factory_model.snpw");
  const Mlp net = init_mlp<float>(33);
  save_model(net, path);

  const std::string mlp_text = "mlp:" + path.string();
  const std::string rl_text = "rl:" + path.string();
  const std::string look_text = "rl+look:" + path.string() + ",d=2,s=1,seed=9";

  const std::unique_ptr<Bot> mlp_bot = make_bot(mlp_text);
  const std::unique_ptr<Bot> rl_bot = make_bot(rl_text);
  const std::unique_ptr<Bot> look_bot = make_bot(look_text);
  CHECK(mlp_bot->name() == mlp_text);
  CHECK(rl_bot->name() == rl_text);
  CHECK(look_bot->name() == look_text);
  CHECK(look_bot->seed() == 9);

  // Greedy bots reproduce choose_rl at eps = 0; the lookahead bot reproduces
  // choose_rl_lookahead given the same stream.
  DealState state = new_deal(64, 0);
  const Perspective view = perspective(state, 0);
  const MoveList moves = valid_moves(state);
  Rng r1(5), r2(5);
  CHECK(mlp_bot->choose(view, moves, r1) == choose_rl(net, view, moves, 0.0, r2));
  CHECK(rl_bot->choose(view, moves, r1) == choose_rl(net, view, moves, 0.0, r2));
  Rng r3(6), r4(6);
  CHECK(look_bot->choose(view, moves, r3) ==
        choose_rl_lookahead(net, view, moves, 2, 1, r4));

  // The BotSpec overload builds the same bots as the textual one.
  CHECK(make_bot(parse_bot_spec(mlp_text))->name() == mlp_text);

  // Missing checkpoints and malformed text are loud failures.
  CHECK_THROWS_AS(make_bot("mlp:" + (path.parent_path() / "nope.snpw").string()),
                  StoreError);
  CHECK_THROWS_AS(make_bot("martian:1"), std::invalid_argument);
}

TEST_SUITE_END();
