#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace banach {

/// Worker count: BANACH_REDUCE_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
unsigned thread_count();

/// Runs fn(k) for k in [0, n). Per-index work must be independent; results are
/// identical for every thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  constexpr std::size_t kMinChunk = 4096;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n / kMinChunk));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t k = lo; k < hi; ++k) fn(k);
    });
  }
}

}  // namespace banach
