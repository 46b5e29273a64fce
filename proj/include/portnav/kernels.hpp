#pragma once

#include <cstdint>

namespace portnav::kern {

// Dense-math kernels used by the network code. Every kernel has a scalar
// reference implementation and may have SIMD variants; the active variant is
// selected at runtime from the CPU features (AVX2+FMA on x86). set_isa()
// exists so tests can pin a variant and check scalar/SIMD equivalence.
enum class Isa { scalar = 0, avx2 = 1 };

Isa best_isa();
Isa active_isa();
void set_isa(Isa isa);  // requests above best_isa() fall back to best_isa()
const char* isa_name(Isa isa);

// y = W x + bias, W row-major [rows x cols]; bias may be null.
void matvec(const float* w, const float* x, const float* bias, float* y, int rows, int cols);
void matvec(const double* w, const double* x, const double* bias, double* y, int rows, int cols);

// gx += W^T gy
void matvec_t_acc(const float* w, const float* gy, float* gx, int rows, int cols);
void matvec_t_acc(const double* w, const double* gy, double* gx, int rows, int cols);

// dW += gy (outer) x
void ger_acc(float* dw, const float* gy, const float* x, int rows, int cols);
void ger_acc(double* dw, const double* gy, const double* x, int rows, int cols);

void axpy(float a, const float* x, float* y, int n);
void axpy(double a, const double* x, double* y, int n);

void scal(float a, float* x, int n);
void scal(double a, double* x, int n);

float dot(const float* a, const float* b, int n);
double dot(const double* a, const double* b, int n);

float nrm2sq(const float* x, int n);
double nrm2sq(const double* x, int n);

// Bias-corrected Adam update: m, v are the moment buffers, inv_bc1/inv_bc2
// are 1/(1-beta1^t) and 1/(1-beta2^t) for the current step t.
void adam_step(float* p, float* m, float* v, const float* g, int n, float lr, float beta1,
               float beta2, float eps, float inv_bc1, float inv_bc2);
void adam_step(double* p, double* m, double* v, const double* g, int n, double lr, double beta1,
               double beta2, double eps, double inv_bc1, double inv_bc2);

}  // namespace portnav::kern
