// Copyright 2026 The icl-ngd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ICL_PARALLEL_H_
#define ICL_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace icl {

inline std::size_t DefaultThreads() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Calls fn(i) for i in [0, count) on up to `threads` workers with static
// contiguous chunks. fn must only write state owned by index i; callers
// reduce afterwards in index order, so results never depend on scheduling.
// The first exception thrown (lowest chunk) is rethrown on the caller.
template <typename Fn>
void ParallelFor(std::size_t count, Fn&& fn, std::size_t threads = DefaultThreads()) {
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        try {
          for (std::size_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace icl

#endif  // ICL_PARALLEL_H_
