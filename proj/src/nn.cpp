#include "schnapsen/nn.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "schnapsen/rng.hpp"

namespace schnapsen {
namespace {

template <typename T>
T sigmoid(T z) {
  if (z >= T(0)) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

// Fixed-order lane-partitioned dot product: the accumulation order never
// depends on thread count or build flags, yet the loop still vectorizes
// without any floating-point reassociation by the compiler.
template <typename T>
T dot_features(const T* a, const T* b) {
  constexpr int kLanes = 8;
  constexpr int kRound = (kNumFeatures / kLanes) * kLanes;
  T lane[kLanes] = {};
  for (int k = 0; k < kRound; k += kLanes)
    for (int l = 0; l < kLanes; ++l) lane[l] += a[k + l] * b[k + l];
  T tail = T(0);
  for (int k = kRound; k < kNumFeatures; ++k) tail += a[k] * b[k];
  T sum = T(0);
  for (int l = 0; l < kLanes; ++l) sum += lane[l];
  return sum + tail;
}

// Per-sample forward pass shared by forward, forward_batch, and backward.
// noinline so every caller runs the exact same machine code and single-sample
// and batched evaluations agree bit for bit. Fills hidden[kHiddenUnits] with
// the ReLU activations when non-null; returns the pre-sigmoid output.
template <typename T>
[[gnu::noinline]] T hidden_forward(const MlpT<T>& net, const T* x, T* hidden) {
  T z2 = net.b2;
  for (int j = 0; j < kHiddenUnits; ++j) {
    const T* row = net.w1.data() + static_cast<std::size_t>(j) * kNumFeatures;
    const T z1 = net.b1[j] + dot_features(row, x);
    const T h = z1 > T(0) ? z1 : T(0);
    if (hidden != nullptr) hidden[j] = h;
    z2 += net.w2[j] * h;
  }
  return z2;
}

template <typename T>
void check_net(const MlpT<T>& net) {
  if (net.w1.size() !=
          static_cast<std::size_t>(kHiddenUnits) * kNumFeatures ||
      net.b1.size() != static_cast<std::size_t>(kHiddenUnits) ||
      net.w2.size() != static_cast<std::size_t>(kHiddenUnits)) {
    throw std::invalid_argument("network parameters have the wrong shape");
  }
}

template <typename T>
void check_finite(const T* x, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k)
    if (!std::isfinite(x[k]))
      throw std::invalid_argument("non-finite network input");
}

template <typename T>
void check_batch(const MlpT<T>& net, const BatchT<T>& batch) {
  check_net(net);
  const std::size_t n = batch.targets.size();
  if (n == 0) throw std::invalid_argument("batch holds no samples");
  if (batch.inputs.size() != n * kNumFeatures)
    throw std::invalid_argument("batch inputs and targets disagree in size");
  // Validate before entering any parallel region: kernels must not throw.
  check_finite(batch.inputs.data(), batch.inputs.size());
}

template <typename T>
void forward_batch_impl(const MlpT<T>& net, const BatchT<T>& batch,
                        std::span<T> out, const bool parallel) {
  check_batch(net, batch);
  const int n = batch.size();
  if (out.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("output span does not match batch size");
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < n; ++i) {
    const T* x = batch.inputs.data() + static_cast<std::size_t>(i) * kNumFeatures;
    out[i] = sigmoid(hidden_forward<T>(net, x, nullptr));
  }
}

template <typename T>
MlpT<T> backward_impl(const MlpT<T>& net, const BatchT<T>& batch,
                      const LossKind kind, const bool parallel) {
  check_batch(net, batch);
  const int n = batch.size();

  // Pass A, parallel over samples: hidden activations and the output-layer
  // error delta2 = dL_i/dz2 for every sample.
  std::vector<T> hidden(static_cast<std::size_t>(n) * kHiddenUnits);
  std::vector<T> delta2(n);
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < n; ++i) {
    const T* x = batch.inputs.data() + static_cast<std::size_t>(i) * kNumFeatures;
    T* h = hidden.data() + static_cast<std::size_t>(i) * kHiddenUnits;
    const T y = sigmoid(hidden_forward(net, x, h));
    const T g = batch.targets[i];
    // BCE: d/dz2 of -(g ln y + (1-g) ln(1-y)) collapses to y - g.
    // MSE: d/dz2 of (y - g)^2 is 2 (y - g) y (1 - y).
    delta2[i] = kind == LossKind::Bce ? y - g
                                      : T(2) * (y - g) * y * (T(1) - y);
  }

  MlpT<T> grad;
  grad.w1.assign(net.w1.size(), T(0));
  grad.b1.assign(net.b1.size(), T(0));
  grad.w2.assign(net.w2.size(), T(0));
  grad.encoder_version = net.encoder_version;
  const T inv_n = T(1) / T(n);

  // Output bias: plain fixed-order sum over samples.
  T gb2 = T(0);
  for (int i = 0; i < n; ++i) gb2 += delta2[i];
  grad.b2 = gb2 * inv_n;

  // Pass B, parallel over hidden units: each unit owns its w1 row, its b1
  // entry, and its w2 entry, so rows never race and every accumulation walks
  // the samples in ascending order regardless of thread count.
#pragma omp parallel for schedule(static) if (parallel)
  for (int j = 0; j < kHiddenUnits; ++j) {
    T* w1_row = grad.w1.data() + static_cast<std::size_t>(j) * kNumFeatures;
    T gw2 = T(0);
    T gb1 = T(0);
    for (int i = 0; i < n; ++i) {
      const T h = hidden[static_cast<std::size_t>(i) * kHiddenUnits + j];
      gw2 += delta2[i] * h;
      if (h > T(0)) {  // ReLU passes gradient only where it fired
        const T d1 = delta2[i] * net.w2[j];
        gb1 += d1;
        const T* x =
            batch.inputs.data() + static_cast<std::size_t>(i) * kNumFeatures;
        for (int k = 0; k < kNumFeatures; ++k) w1_row[k] += d1 * x[k];
      }
    }
    grad.w2[j] = gw2 * inv_n;
    grad.b1[j] = gb1 * inv_n;
    for (int k = 0; k < kNumFeatures; ++k) w1_row[k] *= inv_n;
  }
  return grad;
}

// One Adam update over a single parameter array.
template <typename T>
void adam_update(T* param, const T* grad, T* m, T* v, const std::size_t count,
                 const AdamStateT<T>& st, const T c1, const T c2,
                 const bool decay) {
  for (std::size_t e = 0; e < count; ++e) {
    const T g = decay ? grad[e] + st.weight_decay * param[e] : grad[e];
    m[e] = st.beta1 * m[e] + (T(1) - st.beta1) * g;
    v[e] = st.beta2 * v[e] + (T(1) - st.beta2) * g * g;
    const T m_hat = m[e] / c1;
    const T v_hat = v[e] / c2;
    param[e] -= st.lr * m_hat / (std::sqrt(v_hat) + st.eps_hat);
  }
}

}  // namespace

template <typename T>
MlpT<T> init_mlp(std::uint64_t seed) {
  MlpT<T> net;
  net.w1.resize(static_cast<std::size_t>(kHiddenUnits) * kNumFeatures);
  net.b1.assign(kHiddenUnits, T(0));
  net.w2.resize(kHiddenUnits);
  net.b2 = T(0);
  Rng rng(seed);
  const double he_std = std::sqrt(2.0 / kNumFeatures);
  for (auto& w : net.w1) w = static_cast<T>(rng.next_gaussian() * he_std);
  const double xavier_bound = std::sqrt(6.0 / (kHiddenUnits + 1));
  for (auto& w : net.w2)
    w = static_cast<T>((2.0 * rng.next_double() - 1.0) * xavier_bound);
  return net;
}

template <typename T>
AdamStateT<T> make_adam_state(const MlpT<T>& net, T lr, T weight_decay) {
  check_net(net);
  AdamStateT<T> st;
  st.m.w1.assign(net.w1.size(), T(0));
  st.m.b1.assign(net.b1.size(), T(0));
  st.m.w2.assign(net.w2.size(), T(0));
  st.m.b2 = T(0);
  st.v = st.m;
  st.lr = lr;
  st.weight_decay = weight_decay;
  return st;
}

template <typename T>
T forward(const MlpT<T>& net, std::span<const T> x) {
  check_net(net);
  if (x.size() != static_cast<std::size_t>(kNumFeatures))
    throw std::invalid_argument("network input must have 173 features");
  check_finite(x.data(), x.size());
  return sigmoid(hidden_forward<T>(net, x.data(), nullptr));
}

template <typename T>
T mean_loss(std::span<const T> predictions, std::span<const T> targets,
            LossKind kind) {
  if (predictions.size() != targets.size())
    throw std::invalid_argument("predictions and targets differ in length");
  if (predictions.empty())
    throw std::invalid_argument("loss over an empty batch");
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double g = targets[i];
    if (kind == LossKind::Bce) {
      double p = predictions[i];
      p = p < 1e-7 ? 1e-7 : (p > 1.0 - 1e-7 ? 1.0 - 1e-7 : p);
      acc -= g * std::log(p) + (1.0 - g) * std::log1p(-p);
    } else {
      const double d = predictions[i] - g;
      acc += d * d;
    }
  }
  return static_cast<T>(acc / static_cast<double>(predictions.size()));
}

template <typename T>
void forward_batch(const MlpT<T>& net, const BatchT<T>& batch,
                   std::span<T> out) {
  forward_batch_impl(net, batch, out, true);
}

template <typename T>
MlpT<T> backward(const MlpT<T>& net, const BatchT<T>& batch, LossKind kind) {
  return backward_impl(net, batch, kind, true);
}

namespace serial {

template <typename T>
void forward_batch(const MlpT<T>& net, const BatchT<T>& batch,
                   std::span<T> out) {
  forward_batch_impl(net, batch, out, false);
}

template <typename T>
MlpT<T> backward(const MlpT<T>& net, const BatchT<T>& batch, LossKind kind) {
  return backward_impl(net, batch, kind, false);
}

}  // namespace serial

template <typename T>
void adam_step(MlpT<T>& net, const MlpT<T>& gradients, AdamStateT<T>& state) {
  check_net(net);
  if (gradients.w1.size() != net.w1.size() ||
      gradients.b1.size() != net.b1.size() ||
      gradients.w2.size() != net.w2.size())
    throw std::invalid_argument("gradient shape does not match the network");
  if (state.m.w1.size() != net.w1.size() ||
      state.v.w1.size() != net.w1.size() ||
      state.m.b1.size() != net.b1.size() ||
      state.v.b1.size() != net.b1.size() ||
      state.m.w2.size() != net.w2.size() ||
      state.v.w2.size() != net.w2.size())
    throw std::invalid_argument("Adam state shape does not match the network");

  state.t += 1;
  // Bias corrections in double: beta^t underflows gracefully for large t.
  const T c1 = static_cast<T>(
      1.0 - std::pow(static_cast<double>(state.beta1), state.t));
  const T c2 = static_cast<T>(
      1.0 - std::pow(static_cast<double>(state.beta2), state.t));

  adam_update(net.w1.data(), gradients.w1.data(), state.m.w1.data(),
              state.v.w1.data(), net.w1.size(), state, c1, c2, true);
  adam_update(net.b1.data(), gradients.b1.data(), state.m.b1.data(),
              state.v.b1.data(), net.b1.size(), state, c1, c2, false);
  adam_update(net.w2.data(), gradients.w2.data(), state.m.w2.data(),
              state.v.w2.data(), net.w2.size(), state, c1, c2, true);
  adam_update(&net.b2, &gradients.b2, &state.m.b2, &state.v.b2, 1, state, c1,
              c2, false);
}

// The library trains in single precision; double instantiations exist for the
// finite-difference gradient checks.
template MlpT<float> init_mlp<float>(std::uint64_t);
template MlpT<double> init_mlp<double>(std::uint64_t);
template AdamStateT<float> make_adam_state<float>(const MlpT<float>&, float,
                                                  float);
template AdamStateT<double> make_adam_state<double>(const MlpT<double>&,
                                                    double, double);
template float forward<float>(const MlpT<float>&, std::span<const float>);
template double forward<double>(const MlpT<double>&, std::span<const double>);
template float mean_loss<float>(std::span<const float>,
                                std::span<const float>, LossKind);
template double mean_loss<double>(std::span<const double>,
                                  std::span<const double>, LossKind);
template void forward_batch<float>(const MlpT<float>&, const BatchT<float>&,
                                   std::span<float>);
template void forward_batch<double>(const MlpT<double>&, const BatchT<double>&,
                                    std::span<double>);
template MlpT<float> backward<float>(const MlpT<float>&, const BatchT<float>&,
                                     LossKind);
template MlpT<double> backward<double>(const MlpT<double>&,
                                       const BatchT<double>&, LossKind);
template void serial::forward_batch<float>(const MlpT<float>&,
                                           const BatchT<float>&,
                                           std::span<float>);
template void serial::forward_batch<double>(const MlpT<double>&,
                                            const BatchT<double>&,
                                            std::span<double>);
template MlpT<float> serial::backward<float>(const MlpT<float>&,
                                             const BatchT<float>&, LossKind);
template MlpT<double> serial::backward<double>(const MlpT<double>&,
                                               const BatchT<double>&,
                                               LossKind);
template void adam_step<float>(MlpT<float>&, const MlpT<float>&,
                               AdamStateT<float>&);
template void adam_step<double>(MlpT<double>&, const MlpT<double>&,
                                AdamStateT<double>&);

}  // namespace schnapsen
