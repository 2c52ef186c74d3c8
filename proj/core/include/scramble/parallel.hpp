#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace scramble {

/// Worker count: `requested` when non-zero, else SCRAMBLE_THREADS, else the
/// hardware concurrency. SCRAMBLE_THREADS also caps an explicit request.
std::size_t resolve_thread_count(std::size_t requested = 0);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Indices are
/// dealt in contiguous chunks; body must only write state owned by index i.
/// The first exception thrown by any worker is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t w = 0; w < threads; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Fixed block size for order-stable reductions. Partial sums are formed per
/// block in index order and then combined in block order, so the result does
/// not depend on how many workers ran.
inline constexpr std::size_t kReductionBlock = 64;

inline std::size_t reduction_blocks(std::size_t n) {
  return (n + kReductionBlock - 1) / kReductionBlock;
}

}  // namespace scramble
