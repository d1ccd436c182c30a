// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

#include "icl/rng.h"

#include <cmath>

namespace icl {

namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t MixSeed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = SplitMix64(master);
  for (std::uint64_t p : path) h = SplitMix64(h ^ SplitMix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

Rng Rng::Substream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(MixSeed(master, path));
}

double Rng::Laplace(double scale) {
  double u = 0.0;
  do {
    u = Uniform01();
  } while (u == 0.0);
  u -= 0.5;  // (-0.5, 0.5)
  const double mag = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

}  // namespace icl
