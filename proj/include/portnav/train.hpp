#pragma once

#include <cstdint>
#include <stdexcept>

#include "portnav/nets.hpp"
#include "portnav/replay.hpp"

namespace portnav {

struct DivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T>
struct LossParts {
  T total = T(0);
  T value = T(0);
  T reward = T(0);
  T policy = T(0);
};

// k-step unrolled loss: encode once, roll the dynamics through the recorded
// actions, accumulate value/policy losses at each unroll position and reward
// losses on each transition. Masked positions contribute zero; gradients
// flow through the full recurrent unroll. Targets are divided by
// cfg.reward_scale before entering the loss.
template <typename T>
LossParts<T> loss_and_grad(const ModelParams<T>& params, const TrainBatch<T>& batch,
                           const TrainConfig& cfg, Gradient<T>& grad);

struct LearnerMetrics {
  std::int64_t step = 0;
  double j_total = 0.0;
  double j_value = 0.0;
  double j_reward = 0.0;
  double j_policy = 0.0;
  double grad_norm = 0.0;
};

// Owns the float parameters and the Adam state; one step = sample a batch,
// compute loss and gradient, clip, update. Batch sampling re-derives its rng
// from (seed, step) so a reloaded checkpoint resumes bit-identically.
class Learner {
 public:
  Learner(const NetShape& shape, const TrainConfig& cfg, std::uint64_t seed);

  LearnerMetrics step_once(const ReplayBuffer& buffer);

  const ModelParams<float>& params() const { return params_; }
  std::int64_t steps_done() const { return adam_.step; }
  const TrainConfig& config() const { return cfg_; }

  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  TrainConfig cfg_;
  std::uint64_t seed_;
  ModelParams<float> params_;
  AdamState<float> adam_;
  Gradient<float> grad_;
};

}  // namespace portnav
