// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

#include "icl/kernels.h"

#include <atomic>
#include <cstdlib>
#include <string>

#include "icl/errors.h"

namespace icl::kernels {

namespace {

constexpr KernelTable kScalarTable{Isa::kScalar, scalar::Dot, scalar::Axpy,
                                   scalar::Scale, scalar::Max};
#if defined(ICL_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::kAvx2, avx2::Dot, avx2::Axpy, avx2::Scale,
                                 avx2::Max};
#endif
#if defined(ICL_HAVE_NEON)
constexpr KernelTable kNeonTable{Isa::kNeon, neon::Dot, neon::Axpy, neon::Scale,
                                 neon::Max};
#endif

bool CpuSupports(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(ICL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(ICL_HAVE_NEON)
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* Select() {
  if (const char* env = std::getenv("ICL_ISA")) {
    const std::string want(env);
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
      if (want == IsaName(isa) && IsaAvailable(isa)) return &Table(isa);
    }
  }
  if (IsaAvailable(Isa::kAvx2)) return &Table(Isa::kAvx2);
  if (IsaAvailable(Isa::kNeon)) return &Table(Isa::kNeon);
  return &kScalarTable;
}

std::atomic<const KernelTable*>& ActiveSlot() {
  static std::atomic<const KernelTable*> slot{Select()};
  return slot;
}

}  // namespace

bool IsaAvailable(Isa isa) { return CpuSupports(isa); }

const KernelTable& Table(Isa isa) {
  if (!IsaAvailable(isa)) {
    throw ArgumentError("kernel ISA not available: " + std::string(IsaName(isa)));
  }
  switch (isa) {
#if defined(ICL_HAVE_AVX2)
    case Isa::kAvx2:
      return kAvx2Table;
#endif
#if defined(ICL_HAVE_NEON)
    case Isa::kNeon:
      return kNeonTable;
#endif
    default:
      return kScalarTable;
  }
}

const KernelTable& Active() { return *ActiveSlot().load(std::memory_order_acquire); }

Isa SetActive(Isa isa) {
  const KernelTable* next = &Table(isa);
  return ActiveSlot().exchange(next, std::memory_order_acq_rel)->isa;
}

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

}  // namespace icl::kernels
