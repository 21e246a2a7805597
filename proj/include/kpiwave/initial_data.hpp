#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpiwave/field.hpp"
#include "kpiwave/grid.hpp"
#include "kpiwave/operators.hpp"
#include "kpiwave/rng.hpp"

namespace kpiwave {

/// x-derivative of a Gaussian bump: amp * d^order/dx^order exp(-r^2/w^2),
/// centered at (x0, y0).  Zero x-mean and localized by construction.
inline RealField gaussian_x_derivative(const Grid& g, double amp, double width,
                                       int order = 1, double x0 = 0.0, double y0 = 0.0) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_x_derivative: width must be positive");
  if (order < 1 || order > 2)
    throw std::invalid_argument("gaussian_x_derivative: order must be 1 or 2");
  const double iw2 = 1.0 / (width * width);
  RealField f(g, [=](double x, double y) {
    const double dxv = x - x0, dyv = y - y0;
    const double e = std::exp(-(dxv * dxv + dyv * dyv) * iw2);
    if (order == 1) return amp * (-2.0 * dxv * iw2) * e;
    return amp * (4.0 * dxv * dxv * iw2 - 2.0) * iw2 * e;
  });
  // analytic zero x-mean, made exact against sampling residue
  return project_zero_xmean(f);
}

/// Seeded localized field: the x-derivative of a mixture of (2K+1)^2
/// Gaussians with jittered centers and random weights, normalized to the
/// requested sup amplitude.  Used by the Monte-Carlo probes; zero x-mean
/// because it is a perfect x-derivative of a decaying function.
inline RealField seeded_bump_field(const Grid& g, CounterRng rng, double amp,
                                   double width, int half_modes = 2) {
  const int K = half_modes;
  const int M = 2 * K + 1;
  // Centers jittered on a lattice spanning the middle half of the box.
  const double sx = 0.25 * g.lx() / std::max(K, 1);
  const double sy = 0.25 * g.ly() / std::max(K, 1);
  std::vector<double> cx(M), cy(M), w(static_cast<std::size_t>(M) * M);
  std::uint64_t ctr = 0;
  for (int a = 0; a < M; ++a) cx[a] = (a - K) * sx + 0.35 * sx * rng.sym(ctr++);
  for (int b = 0; b < M; ++b) cy[b] = (b - K) * sy + 0.35 * sy * rng.sym(ctr++);
  for (auto& v : w) v = rng.sym(ctr++);

  // Separable evaluation: f = sum_ab w_ab gx_a'(x) gy_b(y) with per-axis tables.
  const double iw2 = 1.0 / (width * width);
  std::vector<double> gx(static_cast<std::size_t>(M) * g.nx());
  std::vector<double> gy(static_cast<std::size_t>(M) * g.ny());
  for (int a = 0; a < M; ++a)
    for (int i = 0; i < g.nx(); ++i) {
      const double d = g.x(i) - cx[a];
      gx[static_cast<std::size_t>(a) * g.nx() + i] = -2.0 * d * iw2 * std::exp(-d * d * iw2);
    }
  for (int b = 0; b < M; ++b)
    for (int j = 0; j < g.ny(); ++j) {
      const double d = g.y(j) - cy[b];
      gy[static_cast<std::size_t>(b) * g.ny() + j] = std::exp(-d * d * iw2);
    }

  RealField f(g);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      const double wab = w[static_cast<std::size_t>(a) * M + b];
      const double* ga = gx.data() + static_cast<std::size_t>(a) * g.nx();
      const double* gb = gy.data() + static_cast<std::size_t>(b) * g.ny();
      for (int i = 0; i < g.nx(); ++i) {
        double* row = f.samples().data() + static_cast<std::size_t>(i) * g.ny();
        const double fa = wab * ga[i];
        if (fa == 0.0) continue;
        for (int j = 0; j < g.ny(); ++j) row[j] += fa * gb[j];
      }
    }
  f = project_zero_xmean(f);
  const double m = f.max_abs();
  if (m > 0.0) f *= amp / m;
  return f;
}

/// Kernel-like probe data: a flat Gaussian-envelope spectrum exp(-k^2/(2 s^2))
/// with the xi=0 plane removed.  Unlike differentiated bumps, its spectrum
/// does not vanish toward small xi, so it exercises the low-frequency
/// smoothing weights of the dispersive estimates the way the free kernel does.
inline RealField spectral_plateau(const Grid& g, double amp, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("spectral_plateau: sigma must be positive");
  SpectralRep F(g);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int m = 1; m < g.nx(); ++m) {
    const double xi = g.xi(m);
    for (int n = 0; n < g.ny(); ++n) {
      const double eta = g.eta(n);
      F(m, n) = std::exp(-(xi * xi + eta * eta) * inv);
    }
  }
  RealField f = to_real(F);
  const double mx = f.max_abs();
  if (mx > 0.0) f *= amp / mx;
  return f;
}

/// Named initial-data families for the experiment configs.
inline RealField make_initial_data(const Grid& g, const std::string& family, double amp,
                                   double width, std::uint64_t seed, int order = 1,
                                   double x0 = 0.0, double y0 = 0.0) {
  if (family == "zero") return RealField(g);
  if (family == "gaussian_x_derivative")
    return gaussian_x_derivative(g, amp, width, order, x0, y0);
  if (family == "seeded_bumps") return seeded_bump_field(g, CounterRng{seed}, amp, width);
  if (family == "spectral_plateau") return spectral_plateau(g, amp, width);
  throw std::invalid_argument("unknown initial-data family: " + family);
}

} // namespace kpiwave
