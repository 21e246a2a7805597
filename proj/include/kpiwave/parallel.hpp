#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace kpiwave {

/// Worker cap: KPIWAVE_THREADS if set, else the hardware count.
inline int max_threads() {
  if (const char* env = std::getenv("KPIWAVE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Run fn(i) for i in [0, n) on up to max_threads() workers.  Each index is
/// processed exactly once and writes only its own output slot, so results
/// do not depend on the worker count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int nt = std::min<std::size_t>(max_threads(), n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += nt) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace kpiwave
