#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace extgraph {

// Number of worker threads used by library-level parallel loops; 0 means
// hardware concurrency.
inline std::atomic<unsigned>& thread_count_setting() {
  static std::atomic<unsigned> value{0};
  return value;
}

inline unsigned effective_threads() {
  unsigned t = thread_count_setting().load();
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return t;
}

// Runs fn(i) for i in [0, n). Results must be written to index-addressed
// storage so the outcome is independent of scheduling. The first exception
// thrown by any task is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(effective_threads(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace extgraph
