#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpiwave {

inline constexpr double pi = std::numbers::pi;

/// Uniform periodic grid on the box [-lx/2, lx/2) x [-ly/2, ly/2).
///
/// Sample counts are powers of two so the FFT stays radix-2 friendly and
/// the 2/3-rule masks land on integer indices.  Wavenumbers follow the
/// usual DFT ordering: index m maps to the integer frequency
/// j = m for m < n/2 and j = m - n otherwise, so the array is
/// antisymmetric about zero except for the unpaired Nyquist mode.
class Grid {
public:
  Grid(int nx, int ny, double lx, double ly)
      : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
    if (!is_pow2_ge8(nx) || !is_pow2_ge8(ny))
      throw std::invalid_argument("Grid: nx, ny must be powers of two >= 8, got " +
                                  std::to_string(nx) + "x" + std::to_string(ny));
    if (!(lx > 0.0) || !(ly > 0.0))
      throw std::invalid_argument("Grid: box lengths must be positive");
    xi_.resize(nx);
    eta_.resize(ny);
    for (int m = 0; m < nx; ++m) xi_[m] = 2.0 * pi * freq_index(m, nx) / lx;
    for (int n = 0; n < ny; ++n) eta_[n] = 2.0 * pi * freq_index(n, ny) / ly;
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double dx() const { return lx_ / nx_; }
  double dy() const { return ly_ / ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

  double x(int i) const { return -0.5 * lx_ + i * dx(); }
  double y(int j) const { return -0.5 * ly_ + j * dy(); }

  /// Physical wavenumber of spectral index m along x (Nyquist is negative).
  double xi(int m) const { return xi_[m]; }
  double eta(int n) const { return eta_[n]; }

  /// Integer frequency of spectral index m for an n-point transform.
  static int freq_index(int m, int n) { return m < n / 2 ? m : m - n; }

  bool operator==(const Grid& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

private:
  static bool is_pow2_ge8(int n) { return n >= 8 && (n & (n - 1)) == 0; }

  int nx_, ny_;
  double lx_, ly_;
  std::vector<double> xi_, eta_;
};

inline Grid make_grid(int nx, int ny, double lx, double ly) {
  return Grid(nx, ny, lx, ly);
}

} // namespace kpiwave
