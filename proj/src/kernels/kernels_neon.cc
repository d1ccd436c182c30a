// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

#include <arm_neon.h>

#include "icl/kernels.h"

namespace icl::kernels::neon {

double Dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void Axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void Scale(double alpha, double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_n_f64(vld1q_f64(x + i), alpha));
  for (; i < n; ++i) x[i] *= alpha;
}

double Max(const double* x, std::size_t n) {
  std::size_t i = 0;
  double m = x[0];
  if (n >= 2) {
    float64x2_t vm = vld1q_f64(x);
    for (i = 2; i + 2 <= n; i += 2) vm = vmaxq_f64(vm, vld1q_f64(x + i));
    m = vmaxvq_f64(vm);
  }
  for (; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

}  // namespace icl::kernels::neon
