#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "portnav/config.hpp"

namespace portnav {
class Rng;

struct BufferTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One search-annotated step: observation, action taken, reward received,
// the improved search policy and the tree value at that observation.
struct Transition {
  std::vector<float> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<double> policy;
  double v_tree = 0.0;
  bool terminal = false;
};

using Episode = std::vector<Transition>;

struct TrainConfig {
  double discount = 0.997;
  int n_step = 10;           // bootstrap horizon
  int unroll = 5;            // k-step model unroll
  int batch_size = 256;
  std::size_t buffer_capacity = 100000;  // transitions, FIFO by episode
  double lr = 3e-4;
  double grad_clip = 10.0;
  int snapshot_every = 100;   // learner steps between published snapshots
  int checkpoint_every = 500;
  double reward_scale = 1.0;  // value/reward targets divided by this in the loss
  bool unroll_grad_scale = true;  // 1/k loss weight on unroll steps > 0
  std::size_t min_buffer = 2000;  // transitions before training starts
  int train_interval = 8;    // env steps per learner step

  static TrainConfig from_config(const Config& cfg);
};

// n-step discounted return bootstrapped with the stored tree value;
// truncated at the episode end (no rewards or bootstrap past terminal).
double compute_value_target(const Episode& episode, std::size_t t, double gamma, int n);

template <typename T>
struct TrainBatch {
  int batch = 0;
  int unroll = 0;
  int obs_dim = 0;
  int action_count = 0;
  std::vector<T> obs;              // [batch, obs_dim]
  std::vector<int> actions;        // [batch, unroll]
  std::vector<T> reward_targets;   // [batch, unroll]
  std::vector<T> value_targets;    // [batch, unroll]
  std::vector<T> policy_targets;   // [batch, unroll, action_count]
  std::vector<std::uint8_t> mask;  // [batch, unroll], monotone per row
};

// FIFO-by-episode replay store; appends and samples may run concurrently.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void add_episode(Episode episode);
  std::size_t size() const;          // transitions currently held
  std::size_t num_episodes() const;
  std::uint64_t episodes_added() const;
  std::uint64_t transitions_added() const;

  // Uniform over all (episode, t) start indices; deterministic in rng.
  template <typename T>
  TrainBatch<T> sample(const TrainConfig& cfg, int action_count, Rng& rng) const;

 private:
  mutable std::mutex mu_;
  std::size_t capacity_;
  std::deque<Episode> episodes_;
  std::size_t transitions_ = 0;
  std::uint64_t episodes_added_ = 0;
  std::uint64_t transitions_added_ = 0;
};

}  // namespace portnav
