#include "portnav/nets.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "portnav/kernels.hpp"
#include "portnav/rng.hpp"

namespace portnav {
namespace {

template <typename T>
Linear<T> init_linear(int in, int out, Rng& rng) {
  Linear<T> l;
  l.in = in;
  l.out = out;
  l.w.resize(static_cast<std::size_t>(in) * static_cast<std::size_t>(out));
  l.b.assign(static_cast<std::size_t>(out), T(0));
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  for (auto& w : l.w) {
    w = static_cast<T>(rng.uniform(-limit, limit));
  }
  return l;
}

template <typename T>
Mlp<T> init_mlp(int in, int out, const NetShape& s, Rng& rng) {
  Mlp<T> net;
  int cur = in;
  for (int i = 0; i < s.hidden_layers; ++i) {
    net.layers.push_back(init_linear<T>(cur, s.hidden_dim, rng));
    cur = s.hidden_dim;
  }
  net.layers.push_back(init_linear<T>(cur, out, rng));
  return net;
}

template <typename T>
Mlp<T> zeros_like_mlp(const Mlp<T>& src) {
  Mlp<T> out;
  for (const Linear<T>& l : src.layers) {
    Linear<T> z;
    z.in = l.in;
    z.out = l.out;
    z.w.assign(l.w.size(), T(0));
    z.b.assign(l.b.size(), T(0));
    out.layers.push_back(std::move(z));
  }
  return out;
}

template <typename T>
void collect_tensors(Mlp<T>& net, std::vector<std::vector<T>*>& out) {
  for (Linear<T>& l : net.layers) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
}

template <typename T>
void collect_tensors(const Mlp<T>& net, std::vector<const std::vector<T>*>& out) {
  for (const Linear<T>& l : net.layers) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
}

template <typename T>
void onehot_append(std::vector<T>& v, int index, int count) {
  const std::size_t base = v.size();
  v.resize(base + static_cast<std::size_t>(count), T(0));
  v[base + static_cast<std::size_t>(index)] = T(1);
}

}  // namespace

template <typename T>
ModelParams<T> ModelParams<T>::init(const NetShape& shape, std::uint64_t seed) {
  ModelParams<T> p;
  p.shape = shape;
  Rng rng(seed);
  p.repr = init_mlp<T>(shape.obs_dim, shape.latent_dim, shape, rng);
  p.dyn = init_mlp<T>(shape.latent_dim + shape.action_count, 1 + shape.latent_dim, shape, rng);
  p.pred = init_mlp<T>(shape.latent_dim, 1 + shape.action_count, shape, rng);
  return p;
}

template <typename T>
std::size_t ModelParams<T>::size() const {
  std::size_t n = 0;
  for (const auto* t : tensors()) {
    n += t->size();
  }
  return n;
}

template <typename T>
std::vector<std::vector<T>*> ModelParams<T>::tensors() {
  std::vector<std::vector<T>*> out;
  collect_tensors(repr, out);
  collect_tensors(dyn, out);
  collect_tensors(pred, out);
  return out;
}

template <typename T>
std::vector<const std::vector<T>*> ModelParams<T>::tensors() const {
  std::vector<const std::vector<T>*> out;
  collect_tensors(repr, out);
  collect_tensors(dyn, out);
  collect_tensors(pred, out);
  return out;
}

template <typename T>
T ModelParams<T>::get_flat(std::size_t i) const {
  for (const auto* t : tensors()) {
    if (i < t->size()) {
      return (*t)[i];
    }
    i -= t->size();
  }
  throw std::out_of_range("flat parameter index");
}

template <typename T>
void ModelParams<T>::add_flat(std::size_t i, T delta) {
  for (auto* t : tensors()) {
    if (i < t->size()) {
      (*t)[i] += delta;
      return;
    }
    i -= t->size();
  }
  throw std::out_of_range("flat parameter index");
}

template <typename T>
template <typename U>
ModelParams<U> ModelParams<T>::cast() const {
  ModelParams<U> out;
  out.shape = shape;
  for (const Mlp<T>* src : {&repr, &dyn, &pred}) {
    Mlp<U> dst;
    for (const Linear<T>& l : src->layers) {
      Linear<U> d;
      d.in = l.in;
      d.out = l.out;
      d.w.reserve(l.w.size());
      d.b.reserve(l.b.size());
      for (T x : l.w) d.w.push_back(static_cast<U>(x));
      for (T x : l.b) d.b.push_back(static_cast<U>(x));
      dst.layers.push_back(std::move(d));
    }
    if (src == &repr) out.repr = std::move(dst);
    else if (src == &dyn) out.dyn = std::move(dst);
    else out.pred = std::move(dst);
  }
  return out;
}

template <typename T>
Gradient<T> Gradient<T>::zeros_like(const ModelParams<T>& params) {
  Gradient<T> g;
  g.repr = zeros_like_mlp(params.repr);
  g.dyn = zeros_like_mlp(params.dyn);
  g.pred = zeros_like_mlp(params.pred);
  return g;
}

template <typename T>
void Gradient<T>::zero() {
  for (auto* t : tensors()) {
    std::fill(t->begin(), t->end(), T(0));
  }
}

template <typename T>
std::vector<std::vector<T>*> Gradient<T>::tensors() {
  std::vector<std::vector<T>*> out;
  collect_tensors(repr, out);
  collect_tensors(dyn, out);
  collect_tensors(pred, out);
  return out;
}

template <typename T>
std::vector<const std::vector<T>*> Gradient<T>::tensors() const {
  std::vector<const std::vector<T>*> out;
  collect_tensors(repr, out);
  collect_tensors(dyn, out);
  collect_tensors(pred, out);
  return out;
}

template <typename T>
T Gradient<T>::get_flat(std::size_t i) const {
  for (const auto* t : tensors()) {
    if (i < t->size()) {
      return (*t)[i];
    }
    i -= t->size();
  }
  throw std::out_of_range("flat gradient index");
}

template <typename T>
T Gradient<T>::norm() const {
  T acc = T(0);
  for (const auto* t : tensors()) {
    acc += kern::nrm2sq(t->data(), static_cast<int>(t->size()));
  }
  return std::sqrt(acc);
}

template <typename T>
void Gradient<T>::scale(T factor) {
  for (auto* t : tensors()) {
    kern::scal(factor, t->data(), static_cast<int>(t->size()));
  }
}

template <typename T>
AdamState<T> AdamState<T>::init(const ModelParams<T>& params, T lr_in) {
  AdamState<T> s;
  s.m.assign(params.size(), T(0));
  s.v.assign(params.size(), T(0));
  s.lr = lr_in;
  return s;
}

template <typename T>
void adam_update(ModelParams<T>& params, const Gradient<T>& grad, AdamState<T>& state) {
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam state does not match parameter count");
  }
  state.step += 1;
  const T bc1 = T(1) - std::pow(state.beta1, static_cast<T>(state.step));
  const T bc2 = T(1) - std::pow(state.beta2, static_cast<T>(state.step));
  const T inv_bc1 = T(1) / bc1;
  const T inv_bc2 = T(1) / bc2;
  auto p_tensors = params.tensors();
  auto g_tensors = grad.tensors();
  std::size_t offset = 0;
  for (std::size_t i = 0; i < p_tensors.size(); ++i) {
    const int n = static_cast<int>(p_tensors[i]->size());
    if (g_tensors[i]->size() != p_tensors[i]->size()) {
      throw std::invalid_argument("gradient is not shape-congruent with params");
    }
    kern::adam_step(p_tensors[i]->data(), state.m.data() + offset, state.v.data() + offset,
                    g_tensors[i]->data(), n, state.lr, state.beta1, state.beta2, state.eps,
                    inv_bc1, inv_bc2);
    offset += static_cast<std::size_t>(n);
  }
}

template <typename T>
std::vector<T> mlp_forward(const Mlp<T>& net, std::span<const T> in, MlpCache<T>* cache) {
  if (in.size() != static_cast<std::size_t>(net.layers.front().in)) {
    throw std::invalid_argument("mlp input dimension mismatch");
  }
  std::vector<T> x(in.begin(), in.end());
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const Linear<T>& l = net.layers[li];
    std::vector<T> y(static_cast<std::size_t>(l.out));
    kern::matvec(l.w.data(), x.data(), l.b.data(), y.data(), l.out, l.in);
    if (cache) {
      cache->inputs.push_back(std::move(x));
      cache->pre.push_back(y);
    }
    if (li + 1 < net.layers.size()) {
      for (T& v : y) {
        v = std::tanh(v);
      }
    }
    x = std::move(y);
  }
  return x;
}

template <typename T>
std::vector<T> mlp_backward(const Mlp<T>& net, const MlpCache<T>& cache, std::span<const T> gout,
                            Mlp<T>& grad_acc) {
  std::vector<T> g(gout.begin(), gout.end());
  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const Linear<T>& l = net.layers[li];
    Linear<T>& gl = grad_acc.layers[li];
    if (li + 1 < net.layers.size()) {
      // g arrives w.r.t. the activated output; fold in tanh'.
      const std::vector<T>& pre = cache.pre[li];
      for (std::size_t i = 0; i < g.size(); ++i) {
        const T t = std::tanh(pre[i]);
        g[i] *= (T(1) - t * t);
      }
    }
    const std::vector<T>& x = cache.inputs[li];
    kern::ger_acc(gl.w.data(), g.data(), x.data(), l.out, l.in);
    kern::axpy(T(1), g.data(), gl.b.data(), l.out);
    std::vector<T> gx(static_cast<std::size_t>(l.in), T(0));
    kern::matvec_t_acc(l.w.data(), g.data(), gx.data(), l.out, l.in);
    g = std::move(gx);
  }
  return g;
}

template <typename T>
std::vector<T> minmax_rescale(std::span<const T> x, RescaleCache<T>* cache) {
  int imin = 0, imax = 0;
  for (int i = 1; i < static_cast<int>(x.size()); ++i) {
    if (x[static_cast<std::size_t>(i)] < x[static_cast<std::size_t>(imin)]) imin = i;
    if (x[static_cast<std::size_t>(i)] > x[static_cast<std::size_t>(imax)]) imax = i;
  }
  const T mn = x[static_cast<std::size_t>(imin)];
  const T mx = x[static_cast<std::size_t>(imax)];
  const T denom = (mx - mn) + T(1e-6);
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (x[i] - mn) / denom;
  }
  if (cache) {
    cache->argmin = imin;
    cache->argmax = imax;
    cache->denom = denom;
    cache->out = out;
  }
  return out;
}

template <typename T>
std::vector<T> minmax_rescale_backward(const RescaleCache<T>& cache, std::span<const T> gy) {
  // y_i = (x_i - x_m) / D with D = x_M - x_m + eps:
  //   dx_j = gy_j / D, dx_m -= (sum gy) / D - (sum gy*y) / D, dx_M -= (sum gy*y) / D
  std::vector<T> gx(gy.size());
  T s1 = T(0), s2 = T(0);
  for (std::size_t i = 0; i < gy.size(); ++i) {
    s1 += gy[i];
    s2 += gy[i] * cache.out[i];
  }
  for (std::size_t i = 0; i < gy.size(); ++i) {
    gx[i] = gy[i] / cache.denom;
  }
  gx[static_cast<std::size_t>(cache.argmin)] += (s2 - s1) / cache.denom;
  gx[static_cast<std::size_t>(cache.argmax)] -= s2 / cache.denom;
  return gx;
}

template <typename T>
std::vector<T> softmax(std::span<const T> logits) {
  T mx = logits[0];
  for (T v : logits) {
    mx = std::max(mx, v);
  }
  std::vector<T> out(logits.size());
  T sum = T(0);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (T& v : out) {
    v /= sum;
  }
  return out;
}

template <typename T>
std::vector<T> represent(const ModelParams<T>& params, std::span<const T> observation) {
  const std::vector<T> h = mlp_forward(params.repr, observation);
  return minmax_rescale<T>(h);
}

template <typename T>
TransitionOut<T> transition(const ModelParams<T>& params, std::span<const T> latent, int action) {
  if (action < 0 || action >= params.shape.action_count) {
    throw std::invalid_argument("action out of range");
  }
  std::vector<T> in(latent.begin(), latent.end());
  onehot_append(in, action, params.shape.action_count);
  std::vector<T> out = mlp_forward(params.dyn, std::span<const T>(in));
  TransitionOut<T> res;
  res.reward = out[0];
  res.latent = minmax_rescale<T>(std::span<const T>(out.data() + 1, out.size() - 1));
  return res;
}

template <typename T>
PredictOut<T> predict(const ModelParams<T>& params, std::span<const T> latent) {
  std::vector<T> out = mlp_forward(params.pred, latent);
  PredictOut<T> res;
  res.value = out[0];
  res.policy = softmax<T>(std::span<const T>(out.data() + 1, out.size() - 1));
  return res;
}

// --- checkpoint io -----------------------------------------------------------

namespace {

constexpr std::uint32_t kMagic = 0x504e434bu;  // "PNCK"
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& f, std::uint32_t v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_i64(std::ofstream& f, std::int64_t v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f32s(std::ofstream& f, const std::vector<float>& v) {
  f.write(reinterpret_cast<const char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(float)));
}

std::uint32_t read_u32(std::ifstream& f) {
  std::uint32_t v = 0;
  f.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::int64_t read_i64(std::ifstream& f) {
  std::int64_t v = 0;
  f.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
void read_f32s(std::ifstream& f, std::vector<float>& v) {
  f.read(reinterpret_cast<char*>(v.data()),
         static_cast<std::streamsize>(v.size() * sizeof(float)));
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams<float>& params,
                     const AdamState<float>* adam, std::int64_t learner_step) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw CheckpointError("cannot open checkpoint for writing: " + path);
  }
  write_u32(f, kMagic);
  write_u32(f, kVersion);
  write_u32(f, adam != nullptr ? 1u : 0u);  // flags
  write_u32(f, static_cast<std::uint32_t>(params.shape.obs_dim));
  write_u32(f, static_cast<std::uint32_t>(params.shape.latent_dim));
  write_u32(f, static_cast<std::uint32_t>(params.shape.action_count));
  write_u32(f, static_cast<std::uint32_t>(params.shape.hidden_dim));
  write_u32(f, static_cast<std::uint32_t>(params.shape.hidden_layers));
  write_i64(f, learner_step);
  const auto tensors = params.tensors();
  write_u32(f, static_cast<std::uint32_t>(tensors.size()));
  for (const auto* t : tensors) {
    write_u32(f, static_cast<std::uint32_t>(t->size()));
    write_f32s(f, *t);
  }
  if (adam) {
    write_i64(f, adam->step);
    const float hp[4] = {adam->lr, adam->beta1, adam->beta2, adam->eps};
    f.write(reinterpret_cast<const char*>(hp), sizeof(hp));
    write_f32s(f, adam->m);
    write_f32s(f, adam->v);
  }
  if (!f) {
    throw CheckpointError("checkpoint write failed: " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw CheckpointError("cannot open checkpoint: " + path);
  }
  if (read_u32(f) != kMagic || read_u32(f) != kVersion) {
    throw CheckpointError("bad checkpoint magic/version: " + path);
  }
  const std::uint32_t flags = read_u32(f);
  NetShape shape;
  shape.obs_dim = static_cast<int>(read_u32(f));
  shape.latent_dim = static_cast<int>(read_u32(f));
  shape.action_count = static_cast<int>(read_u32(f));
  shape.hidden_dim = static_cast<int>(read_u32(f));
  shape.hidden_layers = static_cast<int>(read_u32(f));
  Checkpoint ck;
  ck.learner_step = read_i64(f);
  ck.params = ModelParams<float>::init(shape, 0);
  const std::uint32_t count = read_u32(f);
  auto tensors = ck.params.tensors();
  if (count != tensors.size()) {
    throw CheckpointError("tensor count mismatch in checkpoint: " + path);
  }
  for (auto* t : tensors) {
    const std::uint32_t n = read_u32(f);
    if (n != t->size()) {
      throw CheckpointError("tensor size mismatch in checkpoint: " + path);
    }
    read_f32s(f, *t);
  }
  if (flags & 1u) {
    AdamState<float> adam = AdamState<float>::init(ck.params, 3e-4f);
    adam.step = read_i64(f);
    float hp[4];
    f.read(reinterpret_cast<char*>(hp), sizeof(hp));
    adam.lr = hp[0];
    adam.beta1 = hp[1];
    adam.beta2 = hp[2];
    adam.eps = hp[3];
    read_f32s(f, adam.m);
    read_f32s(f, adam.v);
    ck.adam = std::move(adam);
  }
  if (!f) {
    throw CheckpointError("truncated checkpoint: " + path);
  }
  return ck;
}

// Explicit instantiations: float for the training path, double for tests.
#define PORTNAV_INSTANTIATE_NETS(T)                                                             \
  template struct ModelParams<T>;                                                               \
  template struct Gradient<T>;                                                                  \
  template struct AdamState<T>;                                                                 \
  template void adam_update<T>(ModelParams<T>&, const Gradient<T>&, AdamState<T>&);             \
  template std::vector<T> mlp_forward<T>(const Mlp<T>&, std::span<const T>, MlpCache<T>*);      \
  template std::vector<T> mlp_backward<T>(const Mlp<T>&, const MlpCache<T>&, std::span<const T>, \
                                          Mlp<T>&);                                             \
  template std::vector<T> minmax_rescale<T>(std::span<const T>, RescaleCache<T>*);              \
  template std::vector<T> minmax_rescale_backward<T>(const RescaleCache<T>&, std::span<const T>); \
  template std::vector<T> softmax<T>(std::span<const T>);                                       \
  template std::vector<T> represent<T>(const ModelParams<T>&, std::span<const T>);              \
  template TransitionOut<T> transition<T>(const ModelParams<T>&, std::span<const T>, int);      \
  template PredictOut<T> predict<T>(const ModelParams<T>&, std::span<const T>);

PORTNAV_INSTANTIATE_NETS(float)
PORTNAV_INSTANTIATE_NETS(double)

template ModelParams<float> ModelParams<double>::cast<float>() const;
template ModelParams<double> ModelParams<float>::cast<double>() const;
template ModelParams<float> ModelParams<float>::cast<float>() const;

}  // namespace portnav
