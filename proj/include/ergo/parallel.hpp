#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ergo {

inline int default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(first, last, block_index) over [0, n) split into fixed-size
/// blocks. Block boundaries depend only on block_size, never on the thread
/// count, so per-block results can be reduced in block order to give
/// bit-identical output regardless of scheduling.
inline void parallel_blocks(std::int64_t n, std::int64_t block_size,
                            int threads,
                            const std::function<void(std::int64_t, std::int64_t,
                                                     std::int64_t)>& fn) {
  if (n <= 0) return;
  if (block_size <= 0) block_size = 1;
  const std::int64_t n_blocks = (n + block_size - 1) / block_size;
  if (threads <= 1 || n_blocks == 1) {
    for (std::int64_t b = 0; b < n_blocks; ++b) {
      const std::int64_t lo = b * block_size;
      fn(lo, std::min(n, lo + block_size), b);
    }
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::int64_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= n_blocks) return;
      const std::int64_t lo = b * block_size;
      try {
        fn(lo, std::min(n, lo + block_size), b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  const int n_workers = static_cast<int>(
      std::min<std::int64_t>(threads, n_blocks));
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline constexpr std::int64_t kDefaultBlockSize = 64;

}  // namespace ergo
