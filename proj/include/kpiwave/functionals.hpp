#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kpiwave/fft.hpp"
#include "kpiwave/field.hpp"
#include "kpiwave/operators.hpp"
#include "kpiwave/reduce.hpp"

namespace kpiwave {

/// (integral |f|^p)^{1/p} by the periodic trapezoid rule; p = inf is the
/// grid max.
inline double lebesgue_norm(const RealField& f, double p) {
  if (std::isinf(p)) return f.max_abs();
  if (!(p >= 1.0)) throw std::invalid_argument("lebesgue_norm: p must be >= 1");
  const Grid& g = f.grid();
  const double s = pairwise_sum_fn(g.size(), [&](std::size_t k) {
    return std::pow(std::abs(f.samples()[k]), p);
  });
  return std::pow(g.dx() * g.dy() * s, 1.0 / p);
}

inline double integral(const RealField& f) {
  const Grid& g = f.grid();
  return g.dx() * g.dy() *
         pairwise_sum_fn(g.size(), [&](std::size_t k) { return f.samples()[k]; });
}

namespace detail {

/// L2 norm of w(xi,eta) * coeffs via Parseval.
template <class W>
double weighted_l2(const SpectralRep& F, W&& w) {
  const Grid& g = F.grid();
  const double s = pairwise_sum_fn(g.size(), [&](std::size_t k) {
    const int m = static_cast<int>(k) / g.ny(), n = static_cast<int>(k) % g.ny();
    const double wt = w(g.xi(m), g.eta(n), m, n);
    return wt * wt * std::norm(F.coeffs()[k]);
  });
  return std::sqrt(g.lx() * g.ly() * s);
}

} // namespace detail

/// Norm of H^s_{-1}: weight (1 + |xi|^{-1}) <|xi| + |eta|>^s.
inline double norm_hs_minus1(const RealField& f, double s) {
  SpectralRep F = to_spectral(f);
  require_zero_xmean(F, "norm_hs_minus1");
  return detail::weighted_l2(F, [s](double xi, double eta, int m, int) {
    if (m == 0) return 0.0;
    const double bracket = 1.0 + (std::abs(xi) + std::abs(eta)) * (std::abs(xi) + std::abs(eta));
    return (1.0 + 1.0 / std::abs(xi)) * std::pow(bracket, 0.5 * s);
  });
}

/// Z-space norm ||f|| + ||dx^{-2} f_yy|| + ||f_xx||.
inline double norm_Z(const RealField& f) {
  SpectralRep F = to_spectral(f);
  require_zero_xmean(F, "norm_Z");
  const double l2 = l2_norm(F);
  const double byy = detail::weighted_l2(F, [](double xi, double eta, int m, int) {
    return m == 0 ? 0.0 : eta * eta / (xi * xi);
  });
  const double fxx =
      detail::weighted_l2(F, [](double xi, double, int, int) { return xi * xi; });
  return l2 + byy + fxx;
}

/// X-space norm ||f|| + ||dx^{-1} f_y|| + ||f_xx|| + ||f_y||.
inline double norm_X(const RealField& f) {
  SpectralRep F = to_spectral(f);
  require_zero_xmean(F, "norm_X");
  const double l2 = l2_norm(F);
  const double ay = detail::weighted_l2(F, [](double xi, double eta, int m, int) {
    return m == 0 ? 0.0 : std::abs(eta / xi);
  });
  const double fxx =
      detail::weighted_l2(F, [](double xi, double, int, int) { return xi * xi; });
  const double fy =
      detail::weighted_l2(F, [](double, double eta, int, int) { return std::abs(eta); });
  return l2 + ay + fxx + fy;
}

/// Anisotropic H^{s,0} norm ||J_x^s f||_{L2}.
inline double norm_hs0(const RealField& f, double s) {
  SpectralRep F = to_spectral(f);
  return detail::weighted_l2(
      F, [s](double xi, double, int, int) { return std::pow(1.0 + xi * xi, 0.5 * s); });
}

/// M(u) = integral u^2.
inline double momentum(const RealField& u) {
  const Grid& g = u.grid();
  const double s = pairwise_sum_fn(g.size(), [&](std::size_t k) {
    const double v = u.samples()[k];
    return v * v;
  });
  return g.dx() * g.dy() * s;
}

/// E(u) = 1/2 ||u_x||^2 + 1/2 ||dx^{-1} u_y||^2 - 1/6 integral u^3.
inline double energy(const RealField& u) {
  SpectralRep F = to_spectral(u);
  require_zero_xmean(F, "energy");
  const double ux = detail::weighted_l2(F, [](double xi, double, int, int) { return xi; });
  const double ay = detail::weighted_l2(F, [](double xi, double eta, int m, int) {
    return m == 0 ? 0.0 : eta / xi;
  });
  const Grid& g = u.grid();
  const double cubic = g.dx() * g.dy() * pairwise_sum_fn(g.size(), [&](std::size_t k) {
    const double v = u.samples()[k];
    return v * v * v;
  });
  return 0.5 * ux * ux + 0.5 * ay * ay - cubic / 6.0;
}

/// The almost-conserved functional: seven bulk terms plus the two psi
/// couplings.  Pass psi = nullptr for the plain conservation law F(u).
inline double f_psi(const RealField& u, const RealField* psi = nullptr) {
  SpectralRep F = to_spectral(u);
  require_zero_xmean(F, "f_psi");
  const Grid& g = u.grid();

  const double uxx = detail::weighted_l2(F, [](double xi, double, int, int) { return xi * xi; });
  const double uy = detail::weighted_l2(F, [](double, double eta, int, int) { return eta; });
  const double byy = detail::weighted_l2(F, [](double xi, double eta, int m, int) {
    return m == 0 ? 0.0 : eta * eta / (xi * xi);
  });

  // physical-space companions for the cubic and quartic terms
  SpectralRep tmp = F;
  spectral_map(tmp, [](double xi, double eta, int m, int) -> double {
    return m == 0 ? 0.0 : eta * eta / (xi * xi); // (i eta)^2 (i xi)^{-2}
  });
  RealField B = to_real(tmp); // dx^{-2} u_yy

  tmp = F;
  const int nyqx = g.nx() / 2, nyqy = g.ny() / 2;
  spectral_map(tmp, [nyqx, nyqy](double xi, double eta, int m, int n) -> double {
    if (m == 0 || m == nyqx || n == nyqy) return 0.0; // odd symbol, unpaired planes
    return eta / xi; // (i eta)/(i xi) is real
  });
  RealField A = to_real(tmp); // dx^{-1} u_y

  tmp = F;
  spectral_map(tmp, [](double xi, double, int, int) -> double { return -xi * xi; });
  RealField Uxx = to_real(tmp);

  const double dA = g.dx() * g.dy();
  double t4 = 0, t5 = 0, t6 = 0, t7 = 0, t8 = 0, t9 = 0;
  t4 = pairwise_sum_fn(g.size(), [&](std::size_t k) {
    const double v = u.samples()[k];
    return v * v * B.samples()[k];
  });
  t5 = pairwise_sum_fn(g.size(), [&](std::size_t k) {
    const double a = A.samples()[k];
    return u.samples()[k] * a * a;
  });
  t6 = pairwise_sum_fn(g.size(), [&](std::size_t k) {
    const double v = u.samples()[k];
    return v * v * Uxx.samples()[k];
  });
  t7 = pairwise_sum_fn(g.size(), [&](std::size_t k) {
    const double v = u.samples()[k];
    return v * v * v * v;
  });
  if (psi) {
    if (psi->grid() != g) throw std::invalid_argument("f_psi: psi grid mismatch");
    t8 = pairwise_sum_fn(g.size(), [&](std::size_t k) {
      return psi->samples()[k] * u.samples()[k] * B.samples()[k];
    });
    t9 = pairwise_sum_fn(g.size(), [&](std::size_t k) {
      const double a = A.samples()[k];
      return psi->samples()[k] * a * a;
    });
  }
  return 1.5 * uxx * uxx + 5.0 * uy * uy + (5.0 / 6.0) * byy * byy +
         dA * (-(5.0 / 6.0) * t4 - (5.0 / 6.0) * t5 + 1.25 * t6 + (5.0 / 24.0) * t7 -
               (5.0 / 3.0) * t8 - (5.0 / 6.0) * t9);
}

/// Both sides of the anisotropic Sobolev inequality: returns
/// { integral |u|^p, ||u||_2, ||u_x||_2, ||dx^{-1} u_y||_2 }.
struct SobolevCheck {
  double lhs;
  double l2, ux, ay;
};

inline SobolevCheck sobolev_anisotropic_check(const RealField& u, double p) {
  if (!(p >= 2.0 && p <= 6.0))
    throw std::invalid_argument("sobolev_anisotropic_check: p must be in [2,6]");
  SpectralRep F = to_spectral(u);
  require_zero_xmean(F, "sobolev_anisotropic_check");
  // inequality is proven with decay at infinity; require localization
  const Grid& g = u.grid();
  double edge = 0.0;
  for (int j = 0; j < g.ny(); ++j) edge = std::max(edge, std::abs(u(0, j)));
  for (int i = 0; i < g.nx(); ++i) edge = std::max(edge, std::abs(u(i, 0)));
  if (edge > 1e-8 * u.max_abs())
    throw std::invalid_argument("sobolev_anisotropic_check: field not localized in the box");

  SobolevCheck out;
  out.lhs = g.dx() * g.dy() * pairwise_sum_fn(g.size(), [&](std::size_t k) {
    return std::pow(std::abs(u.samples()[k]), p);
  });
  out.l2 = l2_norm(F);
  out.ux = detail::weighted_l2(F, [](double xi, double, int, int) { return xi; });
  out.ay = detail::weighted_l2(F, [](double xi, double eta, int m, int) {
    return m == 0 ? 0.0 : eta / xi;
  });
  return out;
}

/// sup-norm quotient ||J_x^s u||_inf / (||u||_inf + ||u_x||_inf).
inline double jx_linf_ratio(const RealField& u, double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("jx_linf_ratio: s must be in (0,1)");
  const double denom = u.max_abs() + derivative(u, 'x', 1).max_abs();
  if (denom == 0.0) throw std::invalid_argument("jx_linf_ratio: zero field");
  return fractional_x(u, 'J', s).max_abs() / denom;
}

/// Conservation-law density from the Lax-pair recursion.  chi_1 = u and
///   chi_n = sum_{k=1}^{n-2} chi_k chi_{n-1-k}
///           + sqrt(6) dx chi_{n-1} + i sqrt(2) dx^{-1} dy chi_{n-1}.
/// The sqrt(6), sqrt(2) weights are pinned by the two identities the tower
/// must reproduce: integral Re chi_3 = M and integral Re chi_5 = -12 E.
/// Antiderivatives act after zero-x-mean projection of the operand.
struct ChiField {
  Grid grid;
  std::vector<cplx> samples;
  int index = 1;
};

namespace detail {

inline constexpr double chi_px = 2.449489742783178;  // sqrt(6)
inline constexpr double chi_qy = 1.4142135623730951; // sqrt(2)

/// sqrt(6) dx f + i sqrt(2) dx^{-1} dy (projected f), on a complex field.
inline std::vector<cplx> chi_transport(const Grid& g, const std::vector<cplx>& f) {
  std::vector<cplx> F = fft_forward(g, f);
  const int nyqx = g.nx() / 2, nyqy = g.ny() / 2;
  for (int m = 0; m < g.nx(); ++m) {
    const double xi = g.xi(m);
    for (int n = 0; n < g.ny(); ++n) {
      const double eta = g.eta(n);
      cplx& c = F[static_cast<std::size_t>(m) * g.ny() + n];
      if (m == 0) {
        c = 0.0; // derivative and projected antiderivative both vanish here
        continue;
      }
      cplx mult = chi_px * cplx(0.0, xi);
      if (m == nyqx) mult = 0.0; // odd symbol at the unpaired plane
      cplx adv = cplx(0.0, 1.0) * chi_qy * cplx(0.0, eta) / cplx(0.0, xi);
      if (m == nyqx || n == nyqy) adv = 0.0;
      c *= (mult + adv);
    }
  }
  return fft_backward(g, std::move(F));
}

} // namespace detail

inline ChiField chi(const RealField& u, int n) {
  if (n < 1 || n > 7) throw std::invalid_argument("chi: index must be in [1,7]");
  {
    SpectralRep F = to_spectral(u);
    require_zero_xmean(F, "chi");
  }
  const Grid& g = u.grid();
  std::vector<std::vector<cplx>> tower;
  tower.reserve(n);
  std::vector<cplx> first(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) first[k] = u.samples()[k];
  tower.push_back(std::move(first));
  for (int idx = 2; idx <= n; ++idx) {
    std::vector<cplx> next = detail::chi_transport(g, tower[idx - 2]);
    for (int k = 1; k <= idx - 2; ++k) {
      const auto& a = tower[k - 1];
      const auto& b = tower[idx - 1 - k - 1];
      for (std::size_t s = 0; s < g.size(); ++s) next[s] += a[s] * b[s];
    }
    tower.push_back(std::move(next));
  }
  return ChiField{g, std::move(tower.back()), n};
}

/// integral of the real (or imaginary) part of a chi density.
inline double chi_integral(const ChiField& f, bool imag = false) {
  const Grid& g = f.grid;
  const double s = pairwise_sum_fn(g.size(), [&](std::size_t k) {
    return imag ? f.samples[k].imag() : f.samples[k].real();
  });
  return g.dx() * g.dy() * s;
}

/// One time sample of every diagnostic the harness records.
struct FunctionalReport {
  double t = 0.0;
  double m = 0.0;
  double e = 0.0;
  double fpsi = 0.0;
  double z_norm = 0.0;
  double x_norm = 0.0;
  double hs0_norm = 0.0;
  double linf_u = 0.0;
  double linf_ux = 0.0;
  double linf_uy = 0.0;

  bool all_finite() const {
    for (double v : {t, m, e, fpsi, z_norm, x_norm, hs0_norm, linf_u, linf_ux, linf_uy})
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline FunctionalReport compute_report(double t, const RealField& v, const RealField* psi,
                                       double hs0_order = 2.0) {
  FunctionalReport r;
  r.t = t;
  r.m = momentum(v);
  r.e = energy(v);
  r.fpsi = f_psi(v, psi);
  r.z_norm = norm_Z(v);
  r.x_norm = norm_X(v);
  r.hs0_norm = norm_hs0(v, hs0_order);
  r.linf_u = v.max_abs();
  r.linf_ux = derivative(v, 'x', 1).max_abs();
  r.linf_uy = derivative(v, 'y', 1).max_abs();
  return r;
}

} // namespace kpiwave
