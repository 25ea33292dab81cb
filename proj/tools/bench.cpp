// Benchmark comparing the OpenMP-parallel kernels against their serial
// reference implementations, plus engine and tournament throughput.
//
// Usage: bench [batch_size] [reps]

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "schnapsen/arena.hpp"
#include "schnapsen/bots.hpp"
#include "schnapsen/engine.hpp"
#include "schnapsen/nn.hpp"
#include "schnapsen/rng.hpp"

using namespace schnapsen;

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double seconds_per_call(F&& body, int reps) {
  body();  // warm up
  const auto start = Clock::now();
  for (int i = 0; i < reps; ++i) body();
  const std::chrono::duration<double> elapsed = Clock::now() - start;
  return elapsed.count() / reps;
}

Batch random_batch(int n, Rng& rng) {
  Batch batch;
  batch.inputs.resize(static_cast<std::size_t>(n) * kNumFeatures);
  batch.targets.resize(n);
  for (float& x : batch.inputs) x = static_cast<float>(rng.next_double());
  for (float& t : batch.targets) t = rng.next_below(2) ? 1.0f : 0.0f;
  return batch;
}

bool same_bits(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  const int batch_size = argc > 1 ? std::atoi(argv[1]) : 1'024;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 20;
  if (batch_size < 1 || reps < 1) {
    std::fprintf(stderr, "usage: bench [batch_size >= 1] [reps >= 1]\n");
    return 1;
  }

#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("batch %d, %d reps, %d thread(s)\n\n", batch_size, reps, threads);

  Rng rng(12345);
  const Mlp net = init_mlp<float>(7);
  const Batch batch = random_batch(batch_size, rng);
  std::vector<float> out_serial(batch_size);
  std::vector<float> out_parallel(batch_size);

  const double fwd_serial =
      seconds_per_call([&] { serial::forward_batch(net, batch, std::span<float>(out_serial)); }, reps);
  const double fwd_parallel =
      seconds_per_call([&] { forward_batch(net, batch, std::span<float>(out_parallel)); }, reps);
  std::printf("forward_batch   serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n",
              fwd_serial * 1e3, fwd_parallel * 1e3, fwd_serial / fwd_parallel);

  const Mlp grad_serial = serial::backward(net, batch, LossKind::Mse);
  const Mlp grad_parallel = backward(net, batch, LossKind::Mse);
  const double bwd_serial =
      seconds_per_call([&] { (void)serial::backward(net, batch, LossKind::Mse); }, reps);
  const double bwd_parallel =
      seconds_per_call([&] { (void)backward(net, batch, LossKind::Mse); }, reps);
  std::printf("backward (MSE)  serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n",
              bwd_serial * 1e3, bwd_parallel * 1e3, bwd_serial / bwd_parallel);

  const bool identical = same_bits(out_serial, out_parallel) &&
                         same_bits(grad_serial.w1, grad_parallel.w1) &&
                         same_bits(grad_serial.b1, grad_parallel.b1) &&
                         same_bits(grad_serial.w2, grad_parallel.w2) &&
                         grad_serial.b2 == grad_parallel.b2;
  std::printf("serial/parallel outputs bit-identical: %s\n\n", identical ? "yes" : "NO");

  // Engine throughput: full random-vs-random deals per second.
  {
    const std::int64_t deals = 2'000;
    const auto start = Clock::now();
    std::int64_t moves = 0;
    for (std::int64_t i = 0; i < deals; ++i) {
      DealState state = new_deal(9'000 + static_cast<std::uint64_t>(i), static_cast<int>(i % 2));
      Rng deal_rng(mix_seed(1, 9'000 + static_cast<std::uint64_t>(i)));
      while (!is_terminal(state)) {
        const MoveList legal = valid_moves(state);
        apply_move_unchecked(state, legal[deal_rng.next_below(legal.size())]);
        ++moves;
      }
    }
    const std::chrono::duration<double> elapsed = Clock::now() - start;
    std::printf("engine          %.0f deals/s (%.0f moves/s)\n", deals / elapsed.count(),
                moves / elapsed.count());
  }

  // Tournament throughput at parallelism 1 vs all threads (identical output).
  {
    const std::vector<BotSpec> players = {parse_bot_spec("rand:1")};
    const std::vector<BotSpec> opponents = {parse_bot_spec("bully:2")};
    const std::int64_t n = 4'000;
    const auto t1 = Clock::now();
    const MatrixReport lane1 = run_matrix(players, opponents, n, 0, 1);
    const auto t2 = Clock::now();
    const MatrixReport laneN = run_matrix(players, opponents, n, 0, threads);
    const auto t3 = Clock::now();
    const double s1 = std::chrono::duration<double>(t2 - t1).count();
    const double sN = std::chrono::duration<double>(t3 - t2).count();
    std::printf("tournament      parallelism 1: %.0f games/s   parallelism %d: %.0f games/s   identical: %s\n",
                n / s1, threads, n / sN,
                export_csv(lane1) == export_csv(laneN) ? "yes" : "NO");
  }
  return 0;
}
