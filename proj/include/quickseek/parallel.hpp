#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace quickseek {

// --threads N, else QUICKSEEK_THREADS, else machine parallelism.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QUICKSEEK_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Work-stealing loop over [0, n); f(i) must only touch slot i so the result
// is independent of scheduling.
template <typename F>
void parallel_for(std::uint64_t n, int threads, F&& f) {
  if (threads <= 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    constexpr std::uint64_t chunk = 16;
    while (true) {
      const std::uint64_t start = next.fetch_add(chunk);
      if (start >= n) return;
      const std::uint64_t stop = std::min(start + chunk, n);
      for (std::uint64_t i = start; i < stop; ++i) f(i);
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = static_cast<int>(std::min<std::uint64_t>(threads, n));
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace quickseek
