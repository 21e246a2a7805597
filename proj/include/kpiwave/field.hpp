#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "kpiwave/grid.hpp"

namespace kpiwave {

using cplx = std::complex<double>;

/// Scalar field sampled on the grid, stored row-major with y fastest:
/// samples[ix*ny + iy] = f(x(ix), y(iy)).
class RealField {
public:
  explicit RealField(const Grid& grid)
      : grid_(grid), samples_(grid.size(), 0.0) {}

  template <class F>
  RealField(const Grid& grid, F&& fn) : grid_(grid), samples_(grid.size()) {
    for (int i = 0; i < grid.nx(); ++i)
      for (int j = 0; j < grid.ny(); ++j)
        samples_[idx(i, j)] = fn(grid.x(i), grid.y(j));
  }

  const Grid& grid() const { return grid_; }
  double& operator()(int i, int j) { return samples_[idx(i, j)]; }
  double operator()(int i, int j) const { return samples_[idx(i, j)]; }
  std::vector<double>& samples() { return samples_; }
  const std::vector<double>& samples() const { return samples_; }

  bool all_finite() const {
    for (double v : samples_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : samples_) m = std::max(m, std::abs(v));
    return m;
  }

  RealField& operator+=(const RealField& o) { return zip(o, [](double& a, double b) { a += b; }); }
  RealField& operator-=(const RealField& o) { return zip(o, [](double& a, double b) { a -= b; }); }
  RealField& operator*=(double s) {
    for (double& v : samples_) v *= s;
    return *this;
  }

  friend RealField operator+(RealField a, const RealField& b) { return a += b; }
  friend RealField operator-(RealField a, const RealField& b) { return a -= b; }
  friend RealField operator*(double s, RealField a) { return a *= s; }

private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * grid_.ny() + j; }

  template <class Op>
  RealField& zip(const RealField& o, Op op) {
    if (grid_ != o.grid_) throw std::invalid_argument("RealField: grid mismatch");
    for (std::size_t k = 0; k < samples_.size(); ++k) op(samples_[k], o.samples_[k]);
    return *this;
  }

  Grid grid_;
  std::vector<double> samples_;
};

/// Fourier coefficients on the wavenumber lattice, same layout as RealField:
/// coeffs[m*ny + n] multiplies exp(i (xi(m) x + eta(n) y)).  The convention is
/// coeffs(xi,eta) ~ (1/(lx ly)) \int f exp(-i(x xi + y eta)), so a real cosine
/// of unit amplitude carries 1/2 in each of its two conjugate bins.
class SpectralRep {
public:
  explicit SpectralRep(const Grid& grid)
      : grid_(grid), coeffs_(grid.size(), cplx(0.0, 0.0)) {}

  const Grid& grid() const { return grid_; }
  cplx& operator()(int m, int n) { return coeffs_[idx(m, n)]; }
  cplx operator()(int m, int n) const { return coeffs_[idx(m, n)]; }
  std::vector<cplx>& coeffs() { return coeffs_; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  /// Largest coefficient magnitude on the xi=0 plane, relative gauge for the
  /// zero-x-mean preconditions.
  double zero_mode_mass() const {
    double m = 0.0;
    for (int n = 0; n < grid_.ny(); ++n) m = std::max(m, std::abs(coeffs_[n]));
    return m;
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  bool all_finite() const {
    for (const cplx& c : coeffs_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
  }

private:
  std::size_t idx(int m, int n) const { return static_cast<std::size_t>(m) * grid_.ny() + n; }

  Grid grid_;
  std::vector<cplx> coeffs_;
};

} // namespace kpiwave
