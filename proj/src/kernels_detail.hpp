#pragma once

// Internal dispatch table shared by kernels.cpp and the SIMD translation
// units. Not installed; include only from src/.

namespace portnav::kern::detail {

template <typename T>
struct Ops {
  void (*matvec)(const T*, const T*, const T*, T*, int, int);
  void (*axpy)(T, const T*, T*, int);
  void (*scal)(T, T*, int);
  T (*dot)(const T*, const T*, int);
  T (*nrm2sq)(const T*, int);
  void (*adam_step)(T*, T*, T*, const T*, int, T, T, T, T, T, T);
};

extern Ops<float> scalar_ops_f;
extern Ops<double> scalar_ops_d;

#if defined(__x86_64__) || defined(_M_X64)
#define PORTNAV_HAVE_AVX2_TU 1
extern Ops<float> avx2_ops_f;
extern Ops<double> avx2_ops_d;
#else
#define PORTNAV_HAVE_AVX2_TU 0
#endif

}  // namespace portnav::kern::detail
