#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gaussex {

/// Execution controls shared by all Monte Carlo entry points.
struct Exec {
  unsigned threads = 1;
  std::size_t block_size = 256;  ///< replications per work unit; fixed so results do not depend on threads
};

/// Runs fn(block) for block = 0..n_blocks-1 on up to exec.threads workers.
/// The first exception thrown by any block is rethrown on the caller.
template <class Fn>
void parallel_blocks(std::size_t n_blocks, const Exec& exec, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1U, exec.threads), n_blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      try {
        fn(b);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_blocks);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace gaussex
