#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "scalefit/types.hpp"

namespace scalefit {

/// Worker cap: SCALEFIT_THREADS when set, otherwise hardware concurrency.
inline std::size_t max_threads() {
  if (const char* env = std::getenv("SCALEFIT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Runs body(i) for i in [0, count) on up to max_threads() workers. Tasks must
/// write results only to their own index. The first exception thrown by any
/// task is rethrown after all workers join, so output assembly stays ordered
/// and deterministic regardless of scheduling.
inline void parallel_for(Index count, const std::function<void(Index)>& body) {
  if (count <= 0) return;
  const std::size_t workers =
      std::min<std::size_t>(max_threads(), static_cast<std::size_t>(count));
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const Index i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace scalefit
