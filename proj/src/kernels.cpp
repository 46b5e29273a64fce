#include "portnav/kernels.hpp"

#include <atomic>
#include <cmath>

#include "kernels_detail.hpp"

namespace portnav::kern {
namespace detail {
namespace {

template <typename T>
void matvec_scalar(const T* w, const T* x, const T* bias, T* y, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const T* row = w + static_cast<long>(r) * cols;
    T acc = bias ? bias[r] : T(0);
    for (int c = 0; c < cols; ++c) {
      acc += row[c] * x[c];
    }
    y[r] = acc;
  }
}

template <typename T>
void axpy_scalar(T a, const T* x, T* y, int n) {
  for (int i = 0; i < n; ++i) {
    y[i] += a * x[i];
  }
}

template <typename T>
void scal_scalar(T a, T* x, int n) {
  for (int i = 0; i < n; ++i) {
    x[i] *= a;
  }
}

template <typename T>
T dot_scalar(const T* a, const T* b, int n) {
  T acc = T(0);
  for (int i = 0; i < n; ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

template <typename T>
T nrm2sq_scalar(const T* x, int n) {
  T acc = T(0);
  for (int i = 0; i < n; ++i) {
    acc += x[i] * x[i];
  }
  return acc;
}

template <typename T>
void adam_scalar(T* p, T* m, T* v, const T* g, int n, T lr, T beta1, T beta2, T eps, T inv_bc1,
                 T inv_bc2) {
  for (int i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (T(1) - beta1) * g[i];
    v[i] = beta2 * v[i] + (T(1) - beta2) * g[i] * g[i];
    const T mhat = m[i] * inv_bc1;
    const T vhat = v[i] * inv_bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

Ops<float> scalar_ops_f = {&matvec_scalar<float>, &axpy_scalar<float>, &scal_scalar<float>,
                           &dot_scalar<float>,    &nrm2sq_scalar<float>, &adam_scalar<float>};
Ops<double> scalar_ops_d = {&matvec_scalar<double>, &axpy_scalar<double>, &scal_scalar<double>,
                            &dot_scalar<double>,    &nrm2sq_scalar<double>, &adam_scalar<double>};

}  // namespace detail

namespace {

Isa probe_best() {
#if PORTNAV_HAVE_AVX2_TU
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return Isa::avx2;
  }
#endif
  return Isa::scalar;
}

std::atomic<Isa> g_active{probe_best()};

const detail::Ops<float>* ops_f() {
#if PORTNAV_HAVE_AVX2_TU
  if (g_active.load(std::memory_order_relaxed) == Isa::avx2) {
    return &detail::avx2_ops_f;
  }
#endif
  return &detail::scalar_ops_f;
}

const detail::Ops<double>* ops_d() {
#if PORTNAV_HAVE_AVX2_TU
  if (g_active.load(std::memory_order_relaxed) == Isa::avx2) {
    return &detail::avx2_ops_d;
  }
#endif
  return &detail::scalar_ops_d;
}

}  // namespace

Isa best_isa() { return probe_best(); }

Isa active_isa() { return g_active.load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::avx2 && best_isa() != Isa::avx2) {
    isa = best_isa();
  }
  g_active.store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void matvec(const float* w, const float* x, const float* bias, float* y, int rows, int cols) {
  ops_f()->matvec(w, x, bias, y, rows, cols);
}
void matvec(const double* w, const double* x, const double* bias, double* y, int rows, int cols) {
  ops_d()->matvec(w, x, bias, y, rows, cols);
}

void matvec_t_acc(const float* w, const float* gy, float* gx, int rows, int cols) {
  const auto* ops = ops_f();
  for (int r = 0; r < rows; ++r) {
    ops->axpy(gy[r], w + static_cast<long>(r) * cols, gx, cols);
  }
}
void matvec_t_acc(const double* w, const double* gy, double* gx, int rows, int cols) {
  const auto* ops = ops_d();
  for (int r = 0; r < rows; ++r) {
    ops->axpy(gy[r], w + static_cast<long>(r) * cols, gx, cols);
  }
}

void ger_acc(float* dw, const float* gy, const float* x, int rows, int cols) {
  const auto* ops = ops_f();
  for (int r = 0; r < rows; ++r) {
    ops->axpy(gy[r], x, dw + static_cast<long>(r) * cols, cols);
  }
}
void ger_acc(double* dw, const double* gy, const double* x, int rows, int cols) {
  const auto* ops = ops_d();
  for (int r = 0; r < rows; ++r) {
    ops->axpy(gy[r], x, dw + static_cast<long>(r) * cols, cols);
  }
}

void axpy(float a, const float* x, float* y, int n) { ops_f()->axpy(a, x, y, n); }
void axpy(double a, const double* x, double* y, int n) { ops_d()->axpy(a, x, y, n); }

void scal(float a, float* x, int n) { ops_f()->scal(a, x, n); }
void scal(double a, double* x, int n) { ops_d()->scal(a, x, n); }

float dot(const float* a, const float* b, int n) { return ops_f()->dot(a, b, n); }
double dot(const double* a, const double* b, int n) { return ops_d()->dot(a, b, n); }

float nrm2sq(const float* x, int n) { return ops_f()->nrm2sq(x, n); }
double nrm2sq(const double* x, int n) { return ops_d()->nrm2sq(x, n); }

void adam_step(float* p, float* m, float* v, const float* g, int n, float lr, float beta1,
               float beta2, float eps, float inv_bc1, float inv_bc2) {
  ops_f()->adam_step(p, m, v, g, n, lr, beta1, beta2, eps, inv_bc1, inv_bc2);
}
void adam_step(double* p, double* m, double* v, const double* g, int n, double lr, double beta1,
               double beta2, double eps, double inv_bc1, double inv_bc2) {
  ops_d()->adam_step(p, m, v, g, n, lr, beta1, beta2, eps, inv_bc1, inv_bc2);
}

}  // namespace portnav::kern
