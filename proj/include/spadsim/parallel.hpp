#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace spadsim {

/// Runs fn(i) for i in [0, n) across `threads` workers in contiguous chunks.
/// Work items must be independent; result ordering is the caller's job.
inline void parallel_for(std::uint64_t n, int threads,
                         const std::function<void(std::uint64_t)>& fn) {
  if (n == 0) return;
  if (threads < 1) threads = 1;
  const std::uint64_t t = std::min<std::uint64_t>(threads, n);
  if (t == 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  const std::uint64_t chunk = (n + t - 1) / t;
  for (std::uint64_t w = 0; w < t; ++w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::uint64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace spadsim
