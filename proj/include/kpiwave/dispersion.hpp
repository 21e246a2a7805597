#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kpiwave/fft.hpp"
#include "kpiwave/field.hpp"
#include "kpiwave/functionals.hpp"
#include "kpiwave/operators.hpp"
#include "kpiwave/solver.hpp"

namespace kpiwave {

/// One measurement row of a dispersive probe.
struct ProbeReport {
  double eps = 0.0;
  double q = 0.0;
  double r = 0.0;
  double T = 0.0;
  int nt = 0;
  int samples = 1;
  int nx = 0, ny = 0;
  double observed = 0.0; // quotient or fitted exponent
  double min_obs = 0.0;
  double max_obs = 0.0;
};

/// Discrete free kernel: flat unit spectrum on the zero-x-mean sector
/// propagated by U(t), normalized so that U(t) phi = G(t) * phi under the
/// quadrature-weighted discrete convolution.
inline RealField kernel_G(const Grid& g, double t) {
  if (t == 0.0) throw std::invalid_argument("kernel_G: t=0 kernel is the lattice delta");
  SpectralRep G(g);
  const std::vector<double> theta = linear_phase(g, 0.0);
  const double norm = 1.0 / (g.lx() * g.ly());
  const int nyqx = g.nx() / 2;
  for (int m = 1; m < g.nx(); ++m) {
    if (m == nyqx) continue;
    for (int n = 0; n < g.ny(); ++n)
      G(m, n) = norm * std::polar(1.0, t * theta[static_cast<std::size_t>(m) * g.ny() + n]);
  }
  return to_real(G);
}

/// Quadrature-weighted periodic convolution, evaluated spectrally.
inline RealField convolve(const RealField& a, const RealField& b) {
  if (a.grid() != b.grid()) throw std::invalid_argument("convolve: grid mismatch");
  SpectralRep A = to_spectral(a);
  const SpectralRep B = to_spectral(b);
  const double scale = a.grid().lx() * a.grid().ly();
  for (std::size_t k = 0; k < A.coeffs().size(); ++k) A.coeffs()[k] *= scale * B.coeffs()[k];
  return to_real(A);
}

namespace detail {

/// Fraction of |phi^hat| L1 mass whose group velocity wraps the box within
/// time t.  Group speeds are vx = |3 xi^2 - eta^2/xi^2|, vy = 2|eta/xi|.
inline double wrapped_mass_fraction(const SpectralRep& F, double t) {
  const Grid& g = F.grid();
  double total = 0.0, wrapped = 0.0;
  for (int m = 1; m < g.nx(); ++m) {
    const double xi = g.xi(m);
    for (int n = 0; n < g.ny(); ++n) {
      const double eta = g.eta(n);
      const double w = std::abs(F(m, n));
      total += w;
      const double vx = std::abs(3.0 * xi * xi - eta * eta / (xi * xi));
      const double vy = 2.0 * std::abs(eta / xi);
      const double t_wrap = std::min(0.5 * g.lx() / std::max(vx, 1e-300),
                                     0.5 * g.ly() / std::max(vy, 1e-300));
      if (t_wrap < t) wrapped += w;
    }
  }
  return total > 0.0 ? wrapped / total : 0.0;
}

} // namespace detail

/// Least-squares slope of log ||D_x^{-eps} U(t) phi||_inf against log t.
/// Samples must sit inside the pre-wraparound window: periodic revival would
/// corrupt the fit, so the spectral L1 mass allowed to reach the half-box
/// within the window is capped (wrapped waves keep dispersing, so a few
/// percent of stray mass perturbs the sup fit well below the fit windows).
inline double decay_exponent_fit(const RealField& phi, double eps,
                                 const std::vector<double>& t_samples,
                                 double wrap_mass_tol = 0.05) {
  if (t_samples.size() < 2) throw std::invalid_argument("decay_exponent_fit: need >= 2 samples");
  SpectralRep F = to_spectral(phi);
  require_zero_xmean(F, "decay_exponent_fit");
  double tmax = 0.0;
  for (double t : t_samples) {
    if (!(t > 0.0)) throw std::invalid_argument("decay_exponent_fit: t samples must be positive");
    tmax = std::max(tmax, t);
  }
  if (detail::wrapped_mass_fraction(F, tmax) > wrap_mass_tol)
    throw std::invalid_argument(
        "decay_exponent_fit: t window exceeds the wraparound bound for this band limit");

  SpectralRep W = F;
  if (eps != 0.0) fractional_x_inplace(W, 'D', -eps);
  const std::vector<double> theta = linear_phase(phi.grid(), 0.0);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(t_samples.size());
  for (double t : t_samples) {
    SpectralRep U = W;
    for (std::size_t k = 0; k < U.coeffs().size(); ++k)
      U.coeffs()[k] *= std::polar(1.0, t * theta[k]);
    const double amp = to_real(U).max_abs();
    const double lx = std::log(t), ly = std::log(amp);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// delta(r) = 1 - 2/r of the Strichartz admissibility relation.
inline double strichartz_delta(double r) { return 1.0 - 2.0 / r; }

/// Space-time quotient || D_x^{-eps delta(r)/2} U(t) phi ||_{L^q_T L^r} / ||phi||_{L^2}
/// over nt+1 uniform time samples (trapezoid in t; q = inf takes the sup).
inline double strichartz_quotient(const RealField& phi, double q, double r, double eps, double T,
                                  int nt) {
  if (!(r >= 2.0)) throw std::invalid_argument("strichartz_quotient: r must be >= 2");
  if (!(eps >= 0.0 && eps <= 0.5))
    throw std::invalid_argument("strichartz_quotient: eps must be in [0, 1/2]");
  if (!(T > 0.0) || nt < 1) throw std::invalid_argument("strichartz_quotient: bad T or nt");
  const double dr = strichartz_delta(r);
  const double lhs_rel = (1.0 - eps / 3.0) * dr;
  const double two_over_q = std::isinf(q) ? 0.0 : 2.0 / q;
  if (std::abs(two_over_q - lhs_rel) > 1e-12 || !(lhs_rel < 1.0))
    throw std::invalid_argument("strichartz_quotient: (q, r, eps) violates the admissibility "
                                "relation 2/q = (1 - eps/3) delta(r) < 1");

  SpectralRep F = to_spectral(phi);
  require_zero_xmean(F, "strichartz_quotient");
  const double phi_l2 = l2_norm(F);
  if (phi_l2 == 0.0) return 0.0;

  SpectralRep W = F;
  const double s = -0.5 * eps * dr;
  if (s != 0.0) fractional_x_inplace(W, 'D', s);
  const std::vector<double> theta = linear_phase(phi.grid(), 0.0);

  std::vector<double> norms(nt + 1);
  for (int i = 0; i <= nt; ++i) {
    const double t = T * i / nt;
    SpectralRep U = W;
    for (std::size_t k = 0; k < U.coeffs().size(); ++k)
      U.coeffs()[k] *= std::polar(1.0, t * theta[k]);
    if (std::isinf(r)) {
      norms[i] = to_real(U).max_abs();
    } else if (r == 2.0) {
      norms[i] = l2_norm(U);
    } else {
      norms[i] = lebesgue_norm(to_real(U), r);
    }
  }
  double composed;
  if (std::isinf(q)) {
    composed = 0.0;
    for (double v : norms) composed = std::max(composed, v);
  } else {
    const double dt = T / nt;
    double acc = 0.0;
    for (int i = 0; i <= nt; ++i)
      acc += std::pow(norms[i], q) * ((i == 0 || i == nt) ? 0.5 : 1.0) * dt;
    composed = std::pow(acc, 1.0 / q);
  }
  return composed / phi_l2;
}

/// Both sides of the L1_T L-inf estimate for a sampled run of the
/// perturbation equation, with the constant set to one; the returned
/// quotient is the empirical C_eps.
inline ProbeReport carlos_bound_report(const std::vector<SimState>& run, double eps) {
  if (run.size() < 32)
    throw std::invalid_argument("carlos_bound_report: need >= 32 snapshots for L1_T quadrature");
  const Grid& g = run.front().v.grid();
  RealField psi = run.front().background.profile(g);
  const bool has_psi = run.front().background.kind != BackgroundSpec::Kind::none;

  const double s = 0.5 + eps;
  double lhs = 0.0, sup_jv = 0.0, int_jf = 0.0;
  double prev_vinf = 0.0, prev_jf = 0.0, prev_t = 0.0;
  for (std::size_t i = 0; i < run.size(); ++i) {
    const SimState& st = run[i];
    const double vinf = st.v.max_abs();
    sup_jv = std::max(sup_jv, norm_hs0(st.v, s));
    RealField f(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double vv = st.v.samples()[k];
      f.samples()[k] = -(0.5 * vv * vv + (has_psi ? psi.samples()[k] * vv : 0.0));
    }
    const double jf = norm_hs0(f, s);
    if (i > 0) {
      const double dt = st.t - prev_t;
      lhs += 0.5 * (vinf + prev_vinf) * dt;
      int_jf += 0.5 * (jf + prev_jf) * dt;
    }
    prev_vinf = vinf;
    prev_jf = jf;
    prev_t = st.t;
  }
  const double T = run.back().t - run.front().t;
  const double rhs = (1.0 + T) * sup_jv + int_jf;

  ProbeReport rep;
  rep.eps = eps;
  rep.T = T;
  rep.nt = static_cast<int>(run.size());
  rep.nx = g.nx();
  rep.ny = g.ny();
  rep.observed = rhs > 0.0 ? lhs / rhs : 0.0;
  rep.min_obs = rep.max_obs = rep.observed;
  return rep;
}

} // namespace kpiwave
