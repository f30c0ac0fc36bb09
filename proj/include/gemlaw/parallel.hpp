#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace gemlaw {

/// Worker count: hardware concurrency capped by the GEMLAW_THREADS
/// environment variable (values < 1 mean serial execution).
int max_threads();

/// Runs f(i) for i in [0, n). Work is pulled from a shared counter, so
/// callers that need determinism must write results into per-index slots
/// and reduce afterwards.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      f(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 0; t + 1 < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

}  // namespace gemlaw
