#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace portnav {

// Shapes of the three networks: representation (obs -> latent), dynamics
// (latent + one-hot action -> reward + latent) and prediction (latent ->
// value + policy logits). Hidden layers use tanh; outputs are linear.
struct NetShape {
  int obs_dim = 248;
  int latent_dim = 32;
  int action_count = 27;
  int hidden_dim = 128;
  int hidden_layers = 2;

  bool operator==(const NetShape&) const = default;
};

template <typename T>
struct Linear {
  int in = 0;
  int out = 0;
  std::vector<T> w;  // row-major [out x in]
  std::vector<T> b;
};

template <typename T>
struct Mlp {
  std::vector<Linear<T>> layers;
};

template <typename T>
struct ModelParams {
  NetShape shape;
  Mlp<T> repr;
  Mlp<T> dyn;
  Mlp<T> pred;

  static ModelParams init(const NetShape& shape, std::uint64_t seed);

  std::size_t size() const;
  std::vector<std::vector<T>*> tensors();
  std::vector<const std::vector<T>*> tensors() const;
  // Flat views over all tensors in declaration order, for probes/clipping.
  T get_flat(std::size_t i) const;
  void add_flat(std::size_t i, T delta);

  template <typename U>
  ModelParams<U> cast() const;
};

template <typename T>
struct Gradient {
  Mlp<T> repr;
  Mlp<T> dyn;
  Mlp<T> pred;

  static Gradient zeros_like(const ModelParams<T>& params);
  void zero();
  std::vector<std::vector<T>*> tensors();
  std::vector<const std::vector<T>*> tensors() const;
  T get_flat(std::size_t i) const;
  T norm() const;
  void scale(T factor);
};

template <typename T>
struct AdamState {
  std::vector<T> m;
  std::vector<T> v;
  std::int64_t step = 0;
  T lr = T(3e-4);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);

  static AdamState init(const ModelParams<T>& params, T lr);
};

// Bias-corrected Adam step over the whole parameter tree.
template <typename T>
void adam_update(ModelParams<T>& params, const Gradient<T>& grad, AdamState<T>& state);

// --- forward / backward plumbing -------------------------------------------

template <typename T>
struct MlpCache {
  std::vector<std::vector<T>> inputs;  // input of each layer
  std::vector<std::vector<T>> pre;     // preactivation of each layer
};

template <typename T>
struct RescaleCache {
  int argmin = 0;
  int argmax = 0;
  T denom = T(1);
  std::vector<T> out;
};

template <typename T>
std::vector<T> mlp_forward(const Mlp<T>& net, std::span<const T> in, MlpCache<T>* cache = nullptr);

// Accumulates parameter grads into grad_acc, returns grad w.r.t. the input.
template <typename T>
std::vector<T> mlp_backward(const Mlp<T>& net, const MlpCache<T>& cache, std::span<const T> gout,
                            Mlp<T>& grad_acc);

// Per-vector min-max rescale to [0, 1], the latent stabilization applied to
// the representation and dynamics outputs.
template <typename T>
std::vector<T> minmax_rescale(std::span<const T> x, RescaleCache<T>* cache = nullptr);

template <typename T>
std::vector<T> minmax_rescale_backward(const RescaleCache<T>& cache, std::span<const T> gy);

template <typename T>
std::vector<T> softmax(std::span<const T> logits);

// --- the three model functions ---------------------------------------------

template <typename T>
std::vector<T> represent(const ModelParams<T>& params, std::span<const T> observation);

template <typename T>
struct TransitionOut {
  T reward = T(0);
  std::vector<T> latent;
};

template <typename T>
TransitionOut<T> transition(const ModelParams<T>& params, std::span<const T> latent, int action);

template <typename T>
struct PredictOut {
  T value = T(0);
  std::vector<T> policy;
};

template <typename T>
PredictOut<T> predict(const ModelParams<T>& params, std::span<const T> latent);

// --- checkpoints ------------------------------------------------------------

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  ModelParams<float> params;
  std::optional<AdamState<float>> adam;
  std::int64_t learner_step = 0;
};

// Versioned binary: shape header plus little-endian float32 tensors;
// round-trips bit-exactly.
void save_checkpoint(const std::string& path, const ModelParams<float>& params,
                     const AdamState<float>* adam = nullptr, std::int64_t learner_step = 0);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace portnav
