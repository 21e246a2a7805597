#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace kpiwave::detail {

using cplxl = std::complex<long double>;

/// Iterative radix-2 Cooley-Tukey for power-of-two n, in long double.
/// Only the traveling-wave residual uses this: its xi^4-weighted norm
/// amplifies double-precision transform noise above the spec'd thresholds
/// for sharply peaked profiles.
inline void fft1_ld(cplxl* a, int n, int stride, int sign,
                    std::vector<cplxl>& tw) {
  // bit-reversal permutation
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[static_cast<std::size_t>(i) * stride],
                         a[static_cast<std::size_t>(j) * stride]);
  }
  if (static_cast<int>(tw.size()) != n / 2) {
    tw.resize(n / 2);
    const long double base = 2.0L * 3.14159265358979323846264338327950288L / n;
    for (int k = 0; k < n / 2; ++k)
      tw[k] = cplxl(std::cos(base * k), std::sin(base * k) * sign);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const int step = n / len;
    for (int i = 0; i < n; i += len) {
      for (int k = 0; k < len / 2; ++k) {
        cplxl& u = a[static_cast<std::size_t>(i + k) * stride];
        cplxl& v = a[static_cast<std::size_t>(i + k + len / 2) * stride];
        const cplxl w = tw[static_cast<std::size_t>(k) * step] * v;
        v = u - w;
        u = u + w;
      }
    }
  }
}

/// Unnormalized 2D transform on the row-major (y fastest) layout.
inline void fft2_ld(std::vector<cplxl>& a, int nx, int ny, int sign) {
  if (a.size() != static_cast<std::size_t>(nx) * ny)
    throw std::invalid_argument("fft2_ld: size mismatch");
  std::vector<cplxl> twx, twy;
  for (int i = 0; i < nx; ++i) fft1_ld(a.data() + static_cast<std::size_t>(i) * ny, ny, 1, sign, twy);
  for (int j = 0; j < ny; ++j) fft1_ld(a.data() + j, nx, ny, sign, twx);
}

} // namespace kpiwave::detail
