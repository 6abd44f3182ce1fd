/**
 * @file parallel.hpp
 * @brief Index-parallel loop over independent work items, capped by the
 * THINFILM_THREADS environment variable.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace thinfilm {

/// Worker count: THINFILM_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
  if (const char *s = std::getenv("THINFILM_THREADS")) {
    const long v = std::strtol(s, nullptr, 10);
    if (v > 0) return unsigned(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/**
 * @brief Call fn(i) for i in [0, n). Each index is handled exactly once, so
 * results written per index do not depend on the thread count. The first
 * exception thrown by any call is rethrown after all workers finish.
 */
template <class Fn>
void parallel_for(std::size_t n, Fn &&fn) {
  const unsigned workers = unsigned(std::min<std::size_t>(worker_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < workers; ++k) pool.emplace_back(work);
  for (auto &t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

} // namespace thinfilm
