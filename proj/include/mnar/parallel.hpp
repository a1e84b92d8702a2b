#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mnar {

// Runs fn(i) for i in [0, count) striped across threads. Callers must write
// only to per-index slots; results are then identical for any thread count.
inline void parallel_for(long count, int threads, const std::function<void(long)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  int k = static_cast<int>(std::min<long>(threads, count));
  std::exception_ptr first_error;
  std::mutex guard;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(k);
  for (int t = 0; t < k; ++t) {
    pool.emplace_back([&, t]() {
      for (long i = t; i < count; i += k) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(guard);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mnar
