#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "kpiwave/fft.hpp"
#include "kpiwave/field.hpp"
#include "kpiwave/grid.hpp"
#include "kpiwave/reduce.hpp"

namespace kpiwave {

/// Relative gauge below which the xi=0 plane counts as empty.
inline constexpr double zero_xmean_tol = 1e-10;

/// Apply fn(xi, eta, m, n) as a pointwise multiplier on the coefficients.
template <class Fn>
void spectral_map(SpectralRep& F, Fn&& fn) {
  const Grid& g = F.grid();
  for (int m = 0; m < g.nx(); ++m) {
    const double xi = g.xi(m);
    cplx* row = F.coeffs().data() + static_cast<std::size_t>(m) * g.ny();
    for (int n = 0; n < g.ny(); ++n) row[n] *= fn(xi, g.eta(n), m, n);
  }
}

template <class Fn>
RealField apply_multiplier(const RealField& f, Fn&& fn) {
  SpectralRep F = to_spectral(f);
  spectral_map(F, fn);
  return to_real(F);
}

inline void require_zero_xmean(const SpectralRep& F, const char* who) {
  const double gauge = F.max_abs();
  if (F.zero_mode_mass() > zero_xmean_tol * std::max(gauge, 1e-300))
    throw std::invalid_argument(std::string(who) +
                                ": field must have zero x-mean (xi=0 plane carries mass)");
}

inline void project_zero_xmean_inplace(SpectralRep& F) {
  for (int n = 0; n < F.grid().ny(); ++n) F(0, n) = 0.0;
}

/// Remove the per-y x-mean: coeffs(0, eta) := 0.  Idempotent.
inline RealField project_zero_xmean(const RealField& f) {
  SpectralRep F = to_spectral(f);
  project_zero_xmean_inplace(F);
  return to_real(F);
}

/// d^order/dx^order or d^order/dy^order as a Fourier multiplier (i k)^order.
/// Negative order is only defined along x on zero-x-mean fields and zeroes
/// the xi=0 plane.  Odd symbols zero the unpaired Nyquist plane so the
/// result stays real.
inline void derivative_inplace(SpectralRep& F, char axis, int order) {
  const Grid& g = F.grid();
  if (axis != 'x' && axis != 'y') throw std::invalid_argument("derivative: axis must be x or y");
  if (order == 0) return;
  if (order < 0) {
    if (axis == 'y') throw std::invalid_argument("derivative: negative order only along x");
    require_zero_xmean(F, "derivative");
  }
  const bool odd = order & 1;
  const int nyq_x = g.nx() / 2, nyq_y = g.ny() / 2;
  spectral_map(F, [&](double xi, double eta, int m, int n) -> cplx {
    const double k = axis == 'x' ? xi : eta;
    if ((axis == 'x' && m == 0) || (axis == 'y' && n == 0)) return 0.0;
    if (odd && ((axis == 'x' && m == nyq_x) || (axis == 'y' && n == nyq_y))) return 0.0;
    return std::pow(cplx(0.0, k), order);
  });
}

inline RealField derivative(const RealField& f, char axis, int order) {
  SpectralRep F = to_spectral(f);
  derivative_inplace(F, axis, order);
  return to_real(F);
}

/// 2/3-rule truncation on integer mode indices: |j| > nx/3 or |k| > ny/3.
inline void dealias_inplace(SpectralRep& F) {
  const Grid& g = F.grid();
  const int jc = g.nx() / 3, kc = g.ny() / 3;
  for (int m = 0; m < g.nx(); ++m) {
    const int j = Grid::freq_index(m, g.nx());
    for (int n = 0; n < g.ny(); ++n) {
      const int k = Grid::freq_index(n, g.ny());
      if (std::abs(j) > jc || std::abs(k) > kc) F(m, n) = 0.0;
    }
  }
}

inline SpectralRep dealias(const SpectralRep& F) {
  SpectralRep out = F;
  dealias_inplace(out);
  return out;
}

/// Sharp Littlewood-Paley block in x: lambda=1 keeps |xi| <= 1, lambda=2^k
/// keeps lambda/2 < |xi| <= lambda.  The family is an exact partition of the
/// frequency axis.
inline RealField dyadic_project(const RealField& f, double lambda) {
  int exp2 = 0;
  const double mant = std::frexp(lambda, &exp2);
  if (!(lambda >= 1.0) || mant != 0.5)
    throw std::invalid_argument("dyadic_project: lambda must be dyadic >= 1");
  return apply_multiplier(f, [lambda](double xi, double, int, int) -> double {
    const double a = std::abs(xi);
    if (lambda == 1.0) return a <= 1.0 ? 1.0 : 0.0;
    return (a > 0.5 * lambda && a <= lambda) ? 1.0 : 0.0;
  });
}

/// Sharp frequency-box mollifier: keep eps < |xi| < 1/eps and
/// eps < |eta| < 1/eps, zero elsewhere.
inline RealField mollify(const RealField& f, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("mollify: eps must be in (0,1)");
  const double hi = 1.0 / eps;
  return apply_multiplier(f, [eps, hi](double xi, double eta, int, int) -> double {
    const double a = std::abs(xi), b = std::abs(eta);
    return (a > eps && a < hi && b > eps && b < hi) ? 1.0 : 0.0;
  });
}

/// J_x^s = (1 - dxx)^{s/2} or D_x^s = |xi|^s along x.  D with s<0 needs zero
/// x-mean; |0|^0 is taken as 1 so s=0 is the identity for both kinds.
inline void fractional_x_inplace(SpectralRep& F, char kind, double s) {
  if (kind != 'J' && kind != 'D') throw std::invalid_argument("fractional_x: kind must be J or D");
  if (kind == 'J') {
    spectral_map(F, [s](double xi, double, int, int) -> double {
      return std::pow(1.0 + xi * xi, 0.5 * s);
    });
    return;
  }
  if (s == 0.0) return;
  if (s < 0.0) require_zero_xmean(F, "fractional_x(D)");
  spectral_map(F, [s](double xi, double, int m, int) -> double {
    if (m == 0) return 0.0;
    return std::pow(std::abs(xi), s);
  });
}

inline RealField fractional_x(const RealField& f, char kind, double s) {
  SpectralRep F = to_spectral(f);
  fractional_x_inplace(F, kind, s);
  return to_real(F);
}

/// L2 norm squared from the spectral side (Parseval).
inline double l2_norm_sq(const SpectralRep& F) {
  const Grid& g = F.grid();
  const double s = pairwise_sum_fn(g.size(), [&](std::size_t k) {
    return std::norm(F.coeffs()[k]);
  });
  return g.lx() * g.ly() * s;
}

inline double l2_norm(const SpectralRep& F) { return std::sqrt(l2_norm_sq(F)); }

} // namespace kpiwave
