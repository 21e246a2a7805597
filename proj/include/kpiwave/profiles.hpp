#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpiwave/fft.hpp"
#include "kpiwave/fft_ld.hpp"
#include "kpiwave/field.hpp"
#include "kpiwave/grid.hpp"
#include "kpiwave/operators.hpp"

namespace kpiwave {

/// KdV line soliton 3c sech^2(sqrt(c) x / 2), constant in y, crest at x=0.
/// Periodization is plain truncation; the tail precondition caps the error.
inline RealField kdv_line(const Grid& g, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("kdv_line: speed c must be positive");
  if (std::exp(-std::sqrt(c) * 0.5 * g.lx()) >= 1e-10)
    throw std::invalid_argument("kdv_line: box too small, profile tail exceeds 1e-10");
  const double s = 0.5 * std::sqrt(c);
  return RealField(g, [c, s](double x, double) {
    const double ch = std::cosh(s * x);
    return 3.0 * c / (ch * ch);
  });
}

/// Propagation speed of the Zaitsev wave.
inline double zaitsev_speed(double alpha, double beta) {
  if (!(alpha > 0.0)) throw std::invalid_argument("zaitsev_speed: alpha must be positive");
  if (!(std::abs(beta) < 1.0)) throw std::invalid_argument("zaitsev_speed: |beta| must be < 1");
  return alpha * alpha * (4.0 - beta * beta) / (1.0 - beta * beta);
}

/// Zaitsev profile 12 a^2 (1 - b cosh(ax) cos(dy)) / (cosh(ax) - b cos(dy))^2,
/// localized in x and 2pi/delta periodic in y.
inline RealField zaitsev(const Grid& g, double alpha, double beta, double delta) {
  if (!(alpha > 0.0)) throw std::invalid_argument("zaitsev: alpha must be positive");
  if (!(std::abs(beta) < 1.0)) throw std::invalid_argument("zaitsev: |beta| must be < 1");
  if (!(delta > 0.0)) throw std::invalid_argument("zaitsev: delta must be positive");
  const double periods = g.ly() * delta / (2.0 * pi);
  if (std::abs(periods - std::round(periods)) > 1e-9 * std::max(1.0, periods) ||
      std::round(periods) < 1.0)
    throw std::invalid_argument("zaitsev: ly must be an integer multiple of 2*pi/delta");

  const double a2 = 12.0 * alpha * alpha;
  RealField psi(g, [=](double x, double y) {
    const double ch = std::cosh(alpha * x), K = beta * std::cos(delta * y);
    const double den = ch - K;
    return a2 * (1.0 - ch * K) / (den * den);
  });

  double edge = 0.0;
  for (int j = 0; j < g.ny(); ++j) edge = std::max(edge, std::abs(psi(0, j)));
  if (edge > 1e-10 * psi.max_abs())
    throw std::invalid_argument("zaitsev: box too small, x-tail exceeds 1e-10 of peak");
  return psi;
}

namespace detail {

/// Residual spectrum assembly shared by the double and long-double paths.
/// Modes where both input spectra sit below `rel_floor` of their peaks are
/// skipped: the xi^4 symbol would otherwise amplify transform roundoff on
/// unpopulated modes into a spurious residual floor.
template <class C>
double residual_from_spectra(const Grid& g, const std::vector<C>& P, const std::vector<C>& Q,
                             double c, double rel_floor) {
  using R = typename C::value_type;
  R pmax = 0, qmax = 0, psum = 0;
  for (std::size_t k = 0; k < P.size(); ++k) {
    pmax = std::max(pmax, std::abs(P[k]));
    qmax = std::max(qmax, std::abs(Q[k]));
    psum += std::norm(P[k]);
  }
  if (psum == 0) return 0.0;
  const R pfloor = rel_floor * pmax, qfloor = rel_floor * qmax;
  R acc = 0;
  for (int m = 0; m < g.nx(); ++m) {
    const R xi2 = static_cast<R>(g.xi(m)) * static_cast<R>(g.xi(m));
    for (int n = 0; n < g.ny(); ++n) {
      const std::size_t k = static_cast<std::size_t>(m) * g.ny() + n;
      if (std::abs(P[k]) <= pfloor && std::abs(Q[k]) <= qfloor) continue;
      const R eta = static_cast<R>(g.eta(n));
      const C r = (c * xi2 + xi2 * xi2 + eta * eta) * P[k] - xi2 * Q[k];
      acc += std::norm(r);
    }
  }
  return static_cast<double>(std::sqrt(acc / psum));
}

/// Double-precision residual; fast path for the delta scan.
inline double traveling_residual_fast(const RealField& psi, double c) {
  const Grid& g = psi.grid();
  std::vector<cplx> p(g.size()), q(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double v = psi.samples()[k];
    p[k] = v;
    q[k] = 0.5 * v * v;
  }
  p = fft_forward(g, std::move(p));
  q = fft_forward(g, std::move(q));
  return residual_from_spectra(g, p, q, c, 1e-13);
}

} // namespace detail

/// Relative L2 residual of the traveling-wave equation in differentiated
/// form, (-c psi_x + psi_xxx + psi psi_x)_x - psi_yy, which avoids any
/// antiderivative (the line soliton has nonzero x-mean).  Evaluated in long
/// double: the xi^4-weighted norm amplifies double-precision transform noise
/// past the thresholds of interest for sharply peaked profiles.
inline double traveling_residual(const RealField& psi, double c) {
  const Grid& g = psi.grid();
  std::vector<detail::cplxl> p(g.size()), q(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const long double v = psi.samples()[k];
    p[k] = v;
    q[k] = 0.5L * v * v;
  }
  detail::fft2_ld(p, g.nx(), g.ny(), -1);
  detail::fft2_ld(q, g.nx(), g.ny(), -1);
  // The (-1)^{m+n} origin phase drops out of mode magnitudes; only the
  // normalization matters for the relative norm, and it cancels too.
  return detail::residual_from_spectra(g, p, q, c, 1e-15);
}

namespace detail {

/// Scratch grid fitting exactly one y-period of a trial Zaitsev profile.
/// The x-extent clears the cosh tail and the spacing resolves the sharpened
/// crest at large |beta| (spectral decay slows to exp(-acos(beta) xi/alpha)).
inline Grid zaitsev_scratch_grid(double alpha, double delta) {
  // Box sized so the xi^4-amplified periodization tail stays below the
  // admissible residual; 128 y-harmonics cover the cosine tail to beta ~ 0.9.
  const double lx = 72.0 / alpha;
  const double dx_target = 0.05 / alpha;
  int nx = 8;
  while (nx * dx_target < lx && nx < (1 << 14)) nx *= 2;
  return Grid(nx, 128, lx, 2.0 * pi / delta);
}

/// Long-double-native residual of a trial Zaitsev profile: samples, squares
/// and transforms all in extended precision, since double-precision sampling
/// noise of the peaked profile already exceeds the admissible floor at
/// large alpha once weighted by xi^4.
inline double zaitsev_residual_ld(const Grid& g, double alpha, double beta, double delta,
                                  double c) {
  std::vector<cplxl> p(g.size()), q(g.size());
  const long double a2 = 12.0L * static_cast<long double>(alpha) * alpha;
  const long double lx = g.lx(), ly = g.ly();
  for (int i = 0; i < g.nx(); ++i) {
    const long double x = -0.5L * lx + i * (lx / g.nx());
    const long double ch = std::cosh(static_cast<long double>(alpha) * x);
    for (int j = 0; j < g.ny(); ++j) {
      const long double y = -0.5L * ly + j * (ly / g.ny());
      const long double K = static_cast<long double>(beta) * std::cos(delta * y);
      const long double den = ch - K;
      const long double v = a2 * (1.0L - ch * K) / (den * den);
      const std::size_t k = static_cast<std::size_t>(i) * g.ny() + j;
      p[k] = v;
      q[k] = 0.5L * v * v;
    }
  }
  fft2_ld(p, g.nx(), g.ny(), -1);
  fft2_ld(q, g.nx(), g.ny(), -1);
  return residual_from_spectra(g, p, q, c, 1e-17);
}

inline double zaitsev_trial_residual(double alpha, double beta, double delta,
                                     bool accurate = false) {
  const Grid g = zaitsev_scratch_grid(alpha, delta);
  const double c = zaitsev_speed(alpha, beta);
  if (accurate) return zaitsev_residual_ld(g, alpha, beta, delta, c);
  return traveling_residual_fast(zaitsev(g, alpha, beta, delta), c);
}

template <class Fn>
double golden_min(Fn&& f, double a, double b, int iters) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters && b - a > 1e-15 * b; ++it) {
    if (f1 < f2) {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

} // namespace detail

/// Transverse wavenumber of the Zaitsev wave, found by bracketing the
/// minimum of the traveling residual over a geometric scan in delta and
/// refining by golden-section search.  Deterministic for fixed inputs.
inline double zaitsev_delta(double alpha, double beta) {
  if (!(alpha > 0.0)) throw std::invalid_argument("zaitsev_delta: alpha must be positive");
  if (!(std::abs(beta) > 0.0 && std::abs(beta) < 1.0))
    throw std::invalid_argument("zaitsev_delta: need 0 < |beta| < 1");

  // delta scales like alpha^2; scan a generous window around that.
  const double lo = 0.3 * alpha * alpha, hi = 12.0 * alpha * alpha;
  constexpr int nscan = 48;
  double best_r = std::numeric_limits<double>::infinity();
  int best_i = -1;
  std::vector<double> ds(nscan), rs(nscan);
  for (int i = 0; i < nscan; ++i) {
    ds[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (nscan - 1));
    rs[i] = detail::zaitsev_trial_residual(alpha, beta, ds[i]);
    if (rs[i] < best_r) best_r = rs[i], best_i = i;
  }
  if (best_i <= 0 || best_i >= nscan - 1)
    throw std::runtime_error("zaitsev_delta: no interior residual minimum in scan bracket "
                             "(parameters outside the solution family?)");

  // Coarse minimizer on the fast objective, then a long-double polish: the
  // double-precision residual floor can sit above the admissible level for
  // large alpha, stalling the last digits of delta.  Near the minimum the
  // squared residual is floor^2 + kappa^2 (delta - delta*)^2, an exact
  // parabola, so two rounds of vertex interpolation land on delta*.
  double delta = detail::golden_min(
      [&](double d) { return detail::zaitsev_trial_residual(alpha, beta, d); }, ds[best_i - 1],
      ds[best_i + 1], 60);
  for (double h : {3e-5, 1e-6}) {
    const double x1 = delta * (1.0 - h), x3 = delta * (1.0 + h);
    const double f1 = std::pow(detail::zaitsev_trial_residual(alpha, beta, x1, true), 2);
    const double f2 = std::pow(detail::zaitsev_trial_residual(alpha, beta, delta, true), 2);
    const double f3 = std::pow(detail::zaitsev_trial_residual(alpha, beta, x3, true), 2);
    const double den = f1 - 2.0 * f2 + f3;
    if (den > 0.0) {
      const double v = delta + 0.5 * delta * h * (f1 - f3) / den;
      if (v > x1 && v < x3) delta = v;
    }
  }
  if (detail::zaitsev_trial_residual(alpha, beta, delta, true) > 1e-8)
    throw std::runtime_error("zaitsev_delta: residual at minimizer exceeds 1e-8");
  return delta;
}

/// Which traveling wave rides under the perturbation.
struct BackgroundSpec {
  enum class Kind { none, kdv, zaitsev };

  Kind kind = Kind::none;
  double c = 0.0;      // propagation speed (given for kdv, derived for zaitsev)
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;

  static BackgroundSpec none() { return {}; }

  static BackgroundSpec kdv_line(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("BackgroundSpec: kdv needs c > 0");
    BackgroundSpec b;
    b.kind = Kind::kdv;
    b.c = c;
    return b;
  }

  /// delta < 0 requests the numerical solve.
  static BackgroundSpec zaitsev_wave(double alpha, double beta, double delta = -1.0) {
    BackgroundSpec b;
    b.kind = Kind::zaitsev;
    b.alpha = alpha;
    b.beta = beta;
    b.c = zaitsev_speed(alpha, beta);
    b.delta = delta > 0.0 ? delta : zaitsev_delta(alpha, beta);
    return b;
  }

  RealField profile(const Grid& g) const {
    switch (kind) {
      case Kind::none: return RealField(g);
      case Kind::kdv: return kpiwave::kdv_line(g, c);
      case Kind::zaitsev: return kpiwave::zaitsev(g, alpha, beta, delta);
    }
    throw std::logic_error("BackgroundSpec: bad kind");
  }
};

} // namespace kpiwave
