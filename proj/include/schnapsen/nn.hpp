#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "schnapsen/encoder.hpp"

namespace schnapsen {

// Shallow value network: kNumFeatures inputs -> kHiddenUnits ReLU units -> one
// sigmoid output interpreted as a win probability.
inline constexpr int kHiddenUnits = 512;

enum class LossKind { Bce, Mse };

// Parameter container. Gradients reuse the same shape.
template <typename T>
struct MlpT {
  std::vector<T> w1;  // kHiddenUnits x kNumFeatures, row-major
  std::vector<T> b1;  // kHiddenUnits
  std::vector<T> w2;  // kHiddenUnits: the single output row
  T b2 = T(0);
  std::uint16_t encoder_version = kEncoderVersion;
};

using Mlp = MlpT<float>;    // training/inference precision
using MlpD = MlpT<double>;  // gradient-check precision

template <typename T>
struct BatchT {
  std::vector<T> inputs;   // n x kNumFeatures, row-major
  std::vector<T> targets;  // n entries, each 0 or 1
  int size() const { return static_cast<int>(targets.size()); }
};

using Batch = BatchT<float>;

template <typename T>
struct AdamStateT {
  MlpT<T> m;  // first-moment accumulators, Mlp-shaped
  MlpT<T> v;  // second-moment accumulators, Mlp-shaped
  std::int64_t t = 0;
  T lr = T(5e-4);
  T weight_decay = T(1e-5);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps_hat = T(1e-8);
};

using AdamState = AdamStateT<float>;

// Hidden weights ~ N(0, 2/kNumFeatures) (He, for ReLU), output weights
// ~ U(+/- sqrt(6/(kHiddenUnits+1))) (Xavier), biases zero. Reproducible.
template <typename T>
MlpT<T> init_mlp(std::uint64_t seed);

template <typename T>
AdamStateT<T> make_adam_state(const MlpT<T>& net, T lr, T weight_decay);

// sigmoid(w2 . relu(w1 x + b1) + b2). Throws std::invalid_argument on a
// wrongly sized, non-finite, or uninitialized input/network.
template <typename T>
T forward(const MlpT<T>& net, std::span<const T> x);

// Mean loss over a prediction/target pair of equal lengths. BCE clamps
// predictions to [1e-7, 1 - 1e-7] so log never sees 0.
template <typename T>
T mean_loss(std::span<const T> predictions, std::span<const T> targets,
            LossKind kind);

// Batch kernels. The unqualified versions run the OpenMP-parallel path; the
// serial:: versions run the identical code restricted to one thread, so the
// two are bit-identical by construction (the tests assert this).
template <typename T>
void forward_batch(const MlpT<T>& net, const BatchT<T>& batch,
                   std::span<T> out);

// Exact analytic gradients of the mean loss over the batch.
template <typename T>
MlpT<T> backward(const MlpT<T>& net, const BatchT<T>& batch, LossKind kind);

namespace serial {

template <typename T>
void forward_batch(const MlpT<T>& net, const BatchT<T>& batch,
                   std::span<T> out);

template <typename T>
MlpT<T> backward(const MlpT<T>& net, const BatchT<T>& batch, LossKind kind);

}  // namespace serial

// One bias-corrected Adam update. Weight decay enters as a coupled L2 term
// added to the gradients of the weight matrices only, never the biases.
template <typename T>
void adam_step(MlpT<T>& net, const MlpT<T>& gradients, AdamStateT<T>& state);

}  // namespace schnapsen
