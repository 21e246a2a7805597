#pragma once

#include <cstddef>
#include <span>

namespace kpiwave {

/// Pairwise (cascade) summation.  Deterministic for a fixed element order and
/// O(log n) error growth, which the quadrature tolerances rely on.
inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Pairwise sum of fn(i) for i in [0, n).
template <class Fn>
double pairwise_sum_fn(std::size_t n, Fn&& fn, std::size_t base = 0) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += fn(base + i);
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_fn(half, fn, base) + pairwise_sum_fn(n - half, fn, base + half);
}

} // namespace kpiwave
