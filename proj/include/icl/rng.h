// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ICL_RNG_H_
#define ICL_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace icl {

// Seeded random stream. Substreams are keyed by (master seed, path) so that
// work items can be generated in any order, or concurrently, and still be
// bit-identical to a sequential run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng Substream(std::uint64_t master, std::initializer_list<std::uint64_t> path);

  double Normal() { return normal_(engine_); }
  // Uniform on [0, 1).
  double Uniform01() { return uniform_(engine_); }
  // Laplace(0, scale) by inverse CDF.
  double Laplace(double scale);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t MixSeed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

}  // namespace icl

#endif  // ICL_RNG_H_
