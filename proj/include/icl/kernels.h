// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

// Double-precision inner-loop kernels. Every kernel has a scalar reference
// implementation and, where the target supports it, an AVX2+FMA (x86-64) or
// NEON (aarch64) variant. The variant is selected once at startup from CPU
// features; ICL_ISA=scalar|avx2|neon in the environment overrides the choice.
//
// SIMD variants reassociate sums, so they agree with the scalar reference to
// rounding, not bit-for-bit. Results are bit-reproducible for a fixed ISA.

#ifndef ICL_KERNELS_H_
#define ICL_KERNELS_H_

#include <cstddef>
#include <string_view>

namespace icl::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x[i] *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // max_i x[i]; n >= 1
  double (*max)(const double* x, std::size_t n);
};

namespace scalar {
double Dot(const double* a, const double* b, std::size_t n);
void Axpy(double alpha, const double* x, double* y, std::size_t n);
void Scale(double alpha, double* x, std::size_t n);
double Max(const double* x, std::size_t n);
}  // namespace scalar

namespace avx2 {
double Dot(const double* a, const double* b, std::size_t n);
void Axpy(double alpha, const double* x, double* y, std::size_t n);
void Scale(double alpha, double* x, std::size_t n);
double Max(const double* x, std::size_t n);
}  // namespace avx2

namespace neon {
double Dot(const double* a, const double* b, std::size_t n);
void Axpy(double alpha, const double* x, double* y, std::size_t n);
void Scale(double alpha, double* x, std::size_t n);
double Max(const double* x, std::size_t n);
}  // namespace neon

// Compiled in and supported by the running CPU.
bool IsaAvailable(Isa isa);

// Table for a specific ISA. Throws ArgumentError if unavailable.
const KernelTable& Table(Isa isa);

// Table currently used by the library.
const KernelTable& Active();

// Swaps the active table and returns the previous ISA. Intended for
// equivalence tests; not safe while other threads run kernels.
Isa SetActive(Isa isa);

std::string_view IsaName(Isa isa);

// Restores the previously active ISA on scope exit.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(SetActive(isa)) {}
  ~ScopedIsa() { SetActive(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

}  // namespace icl::kernels

#endif  // ICL_KERNELS_H_
