#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace rcoda {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Tasks must be
// independent; results should be written to preallocated per-index slots so
// the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(int n, int workers, Fn&& fn) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  int nthreads = std::min(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1, std::memory_order_relaxed)) < n;) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace rcoda
