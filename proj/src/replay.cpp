#include "portnav/replay.hpp"

#include <algorithm>
#include <cmath>

#include "portnav/rng.hpp"

namespace portnav {

TrainConfig TrainConfig::from_config(const Config& cfg) {
  TrainConfig t;
  const std::string s = "train";
  t.discount = cfg.get_double(s, "discount", t.discount);
  t.n_step = static_cast<int>(cfg.get_int(s, "n_step", t.n_step));
  t.unroll = static_cast<int>(cfg.get_int(s, "unroll", t.unroll));
  t.batch_size = static_cast<int>(cfg.get_int(s, "batch_size", t.batch_size));
  t.buffer_capacity = static_cast<std::size_t>(
      cfg.get_int(s, "buffer_capacity", static_cast<std::int64_t>(t.buffer_capacity)));
  t.lr = cfg.get_double(s, "lr", t.lr);
  t.grad_clip = cfg.get_double(s, "grad_clip", t.grad_clip);
  t.snapshot_every = static_cast<int>(cfg.get_int(s, "snapshot_every", t.snapshot_every));
  t.checkpoint_every = static_cast<int>(cfg.get_int(s, "checkpoint_every", t.checkpoint_every));
  t.reward_scale = cfg.get_double(s, "reward_scale", t.reward_scale);
  t.unroll_grad_scale = cfg.get_bool(s, "unroll_grad_scale", t.unroll_grad_scale);
  t.min_buffer = static_cast<std::size_t>(
      cfg.get_int(s, "min_buffer", static_cast<std::int64_t>(t.min_buffer)));
  t.train_interval = static_cast<int>(cfg.get_int(s, "train_interval", t.train_interval));
  if (!(t.discount > 0.0 && t.discount <= 1.0) || t.n_step < 1 || t.unroll < 1) {
    throw ConfigError("invalid train config: discount/n_step/unroll");
  }
  return t;
}

double compute_value_target(const Episode& episode, std::size_t t, double gamma, int n) {
  if (t >= episode.size()) {
    throw std::out_of_range("value target index past episode end");
  }
  const std::size_t last = episode.size() - 1;
  double target = 0.0;
  double g = 1.0;
  for (int j = 0; j < n; ++j) {
    const std::size_t idx = t + static_cast<std::size_t>(j);
    if (idx > last) {
      break;
    }
    target += g * episode[idx].reward;
    g *= gamma;
  }
  const std::size_t boot = t + static_cast<std::size_t>(n);
  if (boot <= last) {
    target += g * episode[boot].v_tree;
  }
  return target;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

void ReplayBuffer::add_episode(Episode episode) {
  if (episode.empty()) {
    return;
  }
  std::lock_guard<std::mutex> lock(mu_);
  transitions_ += episode.size();
  transitions_added_ += episode.size();
  episodes_added_ += 1;
  episodes_.push_back(std::move(episode));
  while (transitions_ > capacity_ && episodes_.size() > 1) {
    transitions_ -= episodes_.front().size();
    episodes_.pop_front();
  }
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return transitions_;
}

std::size_t ReplayBuffer::num_episodes() const {
  std::lock_guard<std::mutex> lock(mu_);
  return episodes_.size();
}

std::uint64_t ReplayBuffer::episodes_added() const {
  std::lock_guard<std::mutex> lock(mu_);
  return episodes_added_;
}

std::uint64_t ReplayBuffer::transitions_added() const {
  std::lock_guard<std::mutex> lock(mu_);
  return transitions_added_;
}

template <typename T>
TrainBatch<T> ReplayBuffer::sample(const TrainConfig& cfg, int action_count, Rng& rng) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (transitions_ < static_cast<std::size_t>(cfg.batch_size)) {
    throw BufferTooSmall("replay buffer holds fewer transitions than the batch size");
  }
  const int k = cfg.unroll;
  TrainBatch<T> batch;
  batch.batch = cfg.batch_size;
  batch.unroll = k;
  batch.obs_dim = static_cast<int>(episodes_.front().front().obs.size());
  batch.action_count = action_count;
  batch.obs.resize(static_cast<std::size_t>(cfg.batch_size) * batch.obs_dim);
  batch.actions.assign(static_cast<std::size_t>(cfg.batch_size) * k, 0);
  batch.reward_targets.assign(static_cast<std::size_t>(cfg.batch_size) * k, T(0));
  batch.value_targets.assign(static_cast<std::size_t>(cfg.batch_size) * k, T(0));
  batch.policy_targets.assign(
      static_cast<std::size_t>(cfg.batch_size) * k * static_cast<std::size_t>(action_count),
      T(1) / static_cast<T>(action_count));
  batch.mask.assign(static_cast<std::size_t>(cfg.batch_size) * k, 0);

  for (int b = 0; b < cfg.batch_size; ++b) {
    // Uniform over all stored transitions, then locate the episode.
    std::uint64_t pick = rng.uniform_int(transitions_);
    std::size_t ep_idx = 0;
    while (pick >= episodes_[ep_idx].size()) {
      pick -= episodes_[ep_idx].size();
      ++ep_idx;
    }
    const Episode& ep = episodes_[ep_idx];
    const std::size_t t = static_cast<std::size_t>(pick);
    const std::size_t last = ep.size() - 1;

    std::copy(ep[t].obs.begin(), ep[t].obs.end(),
              batch.obs.begin() + static_cast<std::ptrdiff_t>(b) * batch.obs_dim);
    int last_action = ep[t].action;
    for (int j = 0; j < k; ++j) {
      const std::size_t row = static_cast<std::size_t>(b) * k + static_cast<std::size_t>(j);
      const std::size_t idx = t + static_cast<std::size_t>(j);
      if (idx <= last) {
        batch.mask[row] = 1;
        last_action = ep[idx].action;
        batch.actions[row] = ep[idx].action;
        batch.reward_targets[row] = static_cast<T>(ep[idx].reward);
        batch.value_targets[row] =
            static_cast<T>(compute_value_target(ep, idx, cfg.discount, cfg.n_step));
        for (int a = 0; a < action_count; ++a) {
          batch.policy_targets[row * static_cast<std::size_t>(action_count) +
                               static_cast<std::size_t>(a)] =
              static_cast<T>(ep[idx].policy[static_cast<std::size_t>(a)]);
        }
      } else {
        batch.actions[row] = last_action;  // padded, masked out of the loss
      }
    }
  }
  return batch;
}

template TrainBatch<float> ReplayBuffer::sample<float>(const TrainConfig&, int, Rng&) const;
template TrainBatch<double> ReplayBuffer::sample<double>(const TrainConfig&, int, Rng&) const;

}  // namespace portnav
