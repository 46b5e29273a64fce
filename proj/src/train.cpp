#include "portnav/train.hpp"

#include <cmath>

#include "portnav/kernels.hpp"
#include "portnav/rng.hpp"

namespace portnav {
namespace {

template <typename T>
std::vector<T> log_softmax(std::span<const T> logits) {
  T mx = logits[0];
  for (T v : logits) {
    mx = std::max(mx, v);
  }
  T sum = T(0);
  for (T v : logits) {
    sum += std::exp(v - mx);
  }
  const T lse = mx + std::log(sum);
  std::vector<T> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = logits[i] - lse;
  }
  return out;
}

}  // namespace

template <typename T>
LossParts<T> loss_and_grad(const ModelParams<T>& params, const TrainBatch<T>& batch,
                           const TrainConfig& cfg, Gradient<T>& grad) {
  const NetShape& shape = params.shape;
  if (batch.obs_dim != shape.obs_dim || batch.action_count != shape.action_count) {
    throw std::invalid_argument("batch does not match network shape");
  }
  const int k = batch.unroll;
  const int latent = shape.latent_dim;
  const int actions = shape.action_count;
  const T inv_b = T(1) / static_cast<T>(batch.batch);
  const T inv_scale = T(1) / static_cast<T>(cfg.reward_scale);
  const T unroll_w = cfg.unroll_grad_scale ? T(1) / static_cast<T>(k) : T(1);

  LossParts<T> parts;

  // Reused per-sample scratch.
  std::vector<MlpCache<T>> pred_caches(static_cast<std::size_t>(k));
  std::vector<MlpCache<T>> dyn_caches(static_cast<std::size_t>(k));
  std::vector<RescaleCache<T>> dyn_rescales(static_cast<std::size_t>(k));
  std::vector<std::vector<T>> latents(static_cast<std::size_t>(k) + 1);
  std::vector<T> values(static_cast<std::size_t>(k));
  std::vector<std::vector<T>> logits(static_cast<std::size_t>(k));
  std::vector<std::vector<T>> log_probs(static_cast<std::size_t>(k));
  std::vector<T> reward_preds(static_cast<std::size_t>(k));

  for (int b = 0; b < batch.batch; ++b) {
    const T* obs = batch.obs.data() + static_cast<std::ptrdiff_t>(b) * batch.obs_dim;
    int valid = 0;
    while (valid < k && batch.mask[static_cast<std::size_t>(b) * k + valid] != 0) {
      ++valid;
    }
    if (valid == 0) {
      continue;
    }

    // Forward: encode once, then unroll the dynamics through the actions.
    MlpCache<T> repr_cache;
    RescaleCache<T> repr_rescale;
    const std::vector<T> h =
        mlp_forward(params.repr, std::span<const T>(obs, static_cast<std::size_t>(batch.obs_dim)),
                    &repr_cache);
    latents[0] = minmax_rescale(std::span<const T>(h), &repr_rescale);

    for (int j = 0; j < valid; ++j) {
      const std::size_t row = static_cast<std::size_t>(b) * k + static_cast<std::size_t>(j);
      const T w = (j == 0) ? T(1) : unroll_w;

      std::vector<T> pred_out =
          mlp_forward(params.pred, std::span<const T>(latents[static_cast<std::size_t>(j)]),
                      &pred_caches[static_cast<std::size_t>(j)]);
      values[static_cast<std::size_t>(j)] = pred_out[0];
      logits[static_cast<std::size_t>(j)].assign(pred_out.begin() + 1, pred_out.end());
      log_probs[static_cast<std::size_t>(j)] =
          log_softmax(std::span<const T>(logits[static_cast<std::size_t>(j)]));

      const T v_err = pred_out[0] - batch.value_targets[row] * inv_scale;
      parts.value += w * v_err * v_err * inv_b;

      T kl = T(0);
      for (int a = 0; a < actions; ++a) {
        const T p = batch.policy_targets[row * static_cast<std::size_t>(actions) +
                                         static_cast<std::size_t>(a)];
        if (p > T(0)) {
          kl += p * (std::log(p) - log_probs[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)]);
        }
      }
      parts.policy += w * kl * inv_b;

      std::vector<T> dyn_in = latents[static_cast<std::size_t>(j)];
      dyn_in.resize(static_cast<std::size_t>(latent + actions), T(0));
      dyn_in[static_cast<std::size_t>(latent + batch.actions[row])] = T(1);
      std::vector<T> dyn_out = mlp_forward(params.dyn, std::span<const T>(dyn_in),
                                           &dyn_caches[static_cast<std::size_t>(j)]);
      reward_preds[static_cast<std::size_t>(j)] = dyn_out[0];
      latents[static_cast<std::size_t>(j) + 1] =
          minmax_rescale(std::span<const T>(dyn_out.data() + 1, static_cast<std::size_t>(latent)),
                         &dyn_rescales[static_cast<std::size_t>(j)]);

      const T r_err = dyn_out[0] - batch.reward_targets[row] * inv_scale;
      parts.reward += unroll_w * r_err * r_err * inv_b;
    }

    // Backward through the unroll.
    std::vector<T> g_latent(static_cast<std::size_t>(latent), T(0));
    for (int j = valid - 1; j >= 0; --j) {
      const std::size_t row = static_cast<std::size_t>(b) * k + static_cast<std::size_t>(j);
      const T w = (j == 0) ? T(1) : unroll_w;

      std::vector<T> g_dyn_out(static_cast<std::size_t>(1 + latent), T(0));
      const T r_err = reward_preds[static_cast<std::size_t>(j)] -
                      batch.reward_targets[row] * inv_scale;
      g_dyn_out[0] = unroll_w * T(2) * r_err * inv_b;
      const std::vector<T> g_pre_rescale = minmax_rescale_backward(
          dyn_rescales[static_cast<std::size_t>(j)], std::span<const T>(g_latent));
      std::copy(g_pre_rescale.begin(), g_pre_rescale.end(), g_dyn_out.begin() + 1);
      const std::vector<T> g_dyn_in =
          mlp_backward(params.dyn, dyn_caches[static_cast<std::size_t>(j)],
                       std::span<const T>(g_dyn_out), grad.dyn);
      g_latent.assign(g_dyn_in.begin(), g_dyn_in.begin() + latent);

      std::vector<T> g_pred_out(static_cast<std::size_t>(1 + actions), T(0));
      const T v_err = values[static_cast<std::size_t>(j)] - batch.value_targets[row] * inv_scale;
      g_pred_out[0] = w * T(2) * v_err * inv_b;
      for (int a = 0; a < actions; ++a) {
        const T pi_target = batch.policy_targets[row * static_cast<std::size_t>(actions) +
                                                 static_cast<std::size_t>(a)];
        const T pi_pred = std::exp(log_probs[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)]);
        g_pred_out[static_cast<std::size_t>(1 + a)] = w * (pi_pred - pi_target) * inv_b;
      }
      const std::vector<T> g_pred_in =
          mlp_backward(params.pred, pred_caches[static_cast<std::size_t>(j)],
                       std::span<const T>(g_pred_out), grad.pred);
      kern::axpy(T(1), g_pred_in.data(), g_latent.data(), latent);
    }

    const std::vector<T> g_h =
        minmax_rescale_backward(repr_rescale, std::span<const T>(g_latent));
    mlp_backward(params.repr, repr_cache, std::span<const T>(g_h), grad.repr);
  }

  parts.total = parts.value + parts.reward + parts.policy;
  return parts;
}

template LossParts<float> loss_and_grad<float>(const ModelParams<float>&, const TrainBatch<float>&,
                                               const TrainConfig&, Gradient<float>&);
template LossParts<double> loss_and_grad<double>(const ModelParams<double>&,
                                                 const TrainBatch<double>&, const TrainConfig&,
                                                 Gradient<double>&);

Learner::Learner(const NetShape& shape, const TrainConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      seed_(seed),
      params_(ModelParams<float>::init(shape, Rng::derive(seed, 0xA11))),
      adam_(AdamState<float>::init(params_, static_cast<float>(cfg.lr))),
      grad_(Gradient<float>::zeros_like(params_)) {}

LearnerMetrics Learner::step_once(const ReplayBuffer& buffer) {
  Rng rng(Rng::derive(seed_, 0xB00 + static_cast<std::uint64_t>(adam_.step)));
  const TrainBatch<float> batch = buffer.sample<float>(cfg_, params_.shape.action_count, rng);
  grad_.zero();
  const LossParts<float> parts = loss_and_grad(params_, batch, cfg_, grad_);
  if (!std::isfinite(parts.total)) {
    throw DivergedError("non-finite training loss; halting learner");
  }
  const double gn = static_cast<double>(grad_.norm());
  if (cfg_.grad_clip > 0.0 && gn > cfg_.grad_clip) {
    grad_.scale(static_cast<float>(cfg_.grad_clip / gn));
  }
  adam_update(params_, grad_, adam_);
  LearnerMetrics m;
  m.step = adam_.step;
  m.j_total = parts.total;
  m.j_value = parts.value;
  m.j_reward = parts.reward;
  m.j_policy = parts.policy;
  m.grad_norm = gn;
  return m;
}

void Learner::save(const std::string& path) const {
  save_checkpoint(path, params_, &adam_, adam_.step);
}

void Learner::load(const std::string& path) {
  Checkpoint ck = load_checkpoint(path);
  if (!(ck.params.shape == params_.shape)) {
    throw CheckpointError("checkpoint shape does not match learner");
  }
  params_ = std::move(ck.params);
  if (ck.adam) {
    adam_ = std::move(*ck.adam);
  } else {
    adam_ = AdamState<float>::init(params_, static_cast<float>(cfg_.lr));
  }
}

}  // namespace portnav
