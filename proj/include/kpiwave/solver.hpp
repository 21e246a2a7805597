#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpiwave/fft.hpp"
#include "kpiwave/field.hpp"
#include "kpiwave/functionals.hpp"
#include "kpiwave/operators.hpp"
#include "kpiwave/profiles.hpp"

namespace kpiwave {

struct SolverConfig {
  enum class Scheme { etd_rk4, if_rk4, regularized_imex };

  Scheme scheme = Scheme::etd_rk4;
  double dt = 1e-3;
  double t_end = 1.0;
  double frame_speed = 0.0; // background speed c for the co-moving frame, 0 in the lab frame
  bool dealias = true;
  double reg_epsilon = 0.0; // parabolic regularization strength, regularized_imex only
  int snapshot_stride = 0;
  int diagnostics_stride = 0;
  double hs0_order = 2.0;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("SolverConfig: t_end must be >= 0");
    const bool reg = scheme == Scheme::regularized_imex;
    if (reg && !(reg_epsilon > 0.0))
      throw std::invalid_argument("SolverConfig: regularized_imex needs reg_epsilon > 0");
    if (!reg && reg_epsilon != 0.0)
      throw std::invalid_argument("SolverConfig: reg_epsilon is only for regularized_imex");
  }
};

struct SimState {
  double t = 0.0;
  RealField v;
  BackgroundSpec background;

  SimState(double t_, RealField v_, BackgroundSpec bg) : t(t_), v(std::move(v_)), background(bg) {}
};

class SolverInstability : public std::runtime_error {
public:
  SolverInstability(double t, double dt)
      : std::runtime_error("solver blow-up at t = " + std::to_string(t) +
                           "; non-finite samples detected (try a smaller dt than " +
                           std::to_string(dt) + ")"),
        t_blowup(t) {}
  double t_blowup;
};

/// Phase theta with exp(i t theta) propagating the free (and frame-shifted)
/// flow: theta = xi^3 + eta^2/xi + frame_speed xi, zero on the xi=0 and
/// x-Nyquist planes (those modes are held fixed).
inline std::vector<double> linear_phase(const Grid& g, double frame_speed) {
  std::vector<double> theta(g.size(), 0.0);
  const int nyqx = g.nx() / 2;
  for (int m = 1; m < g.nx(); ++m) {
    if (m == nyqx) continue;
    const double xi = g.xi(m);
    for (int n = 0; n < g.ny(); ++n) {
      const double eta = g.eta(n);
      theta[static_cast<std::size_t>(m) * g.ny() + n] =
          xi * xi * xi + eta * eta / xi + frame_speed * xi;
    }
  }
  return theta;
}

/// Exact free evolution U(t) (plus frame shift); unitary on L2.
inline RealField propagate_linear(const RealField& f, double t, double frame_speed = 0.0) {
  SpectralRep F = to_spectral(f);
  require_zero_xmean(F, "propagate_linear");
  const std::vector<double> theta = linear_phase(f.grid(), frame_speed);
  for (std::size_t k = 0; k < F.coeffs().size(); ++k)
    F.coeffs()[k] *= std::polar(1.0, t * theta[k]);
  return to_real(F);
}

/// -dx(v^2/2 + psi v), the advection terms of the perturbation equation.
/// The product is formed pointwise and dealiased before differentiation;
/// the output is a perfect x-derivative, hence exactly zero x-mean.
inline RealField nonlinear_rhs(const RealField& v, const RealField* psi, bool dealias_products = true) {
  const Grid& g = v.grid();
  if (psi && psi->grid() != g) throw std::invalid_argument("nonlinear_rhs: psi grid mismatch");
  RealField w(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double vv = v.samples()[k];
    w.samples()[k] = 0.5 * vv * vv + (psi ? psi->samples()[k] * vv : 0.0);
  }
  SpectralRep W = to_spectral(w);
  if (dealias_products) dealias_inplace(W);
  derivative_inplace(W, 'x', 1);
  RealField out = to_real(W);
  out *= -1.0;
  return out;
}

namespace detail {

/// phi-type ETD coefficient evaluated by averaging over a unit contour
/// around z; exact for entire functions and free of small-z cancellation.
template <class Fn>
cplx contour_mean(cplx z, Fn&& fn) {
  constexpr int M = 32;
  cplx acc = 0.0;
  for (int m = 0; m < M; ++m) {
    const double th = pi * (2.0 * m + 1.0) / M;
    acc += fn(z + std::polar(1.0, th));
  }
  return acc / static_cast<double>(M);
}

} // namespace detail

/// Spectral-state time stepper for the perturbation equation
///   v_t = -v_xxx + dx^{-1} v_yy + c v_x - dx(v^2/2 + psi v).
/// The linear part is diagonal with symbol i theta; etd_rk4 treats it
/// exactly with the Cox-Matthews fourth-order exponential scheme.
class Stepper {
public:
  Stepper(const Grid& grid, BackgroundSpec bg, SolverConfig cfg)
      : grid_(grid), cfg_(cfg), bg_(bg), theta_(linear_phase(grid, cfg.frame_speed)),
        psi_(grid), vhat_(grid.size(), cplx(0.0)), t_(0.0) {
    cfg_.validate();
    if (bg.kind != BackgroundSpec::Kind::none) {
      if (cfg.frame_speed != bg.c)
        throw std::invalid_argument(
            "Stepper: backgrounds are integrated in the co-moving frame; set frame_speed = c");
      psi_ = bg.profile(grid);
      has_psi_ = true;
    }
    build_coefficients();
  }

  const Grid& grid() const { return grid_; }
  double t() const { return t_; }

  void set_state(const RealField& v, double t) {
    if (v.grid() != grid_) throw std::invalid_argument("Stepper: state grid mismatch");
    SpectralRep F = to_spectral(v);
    require_zero_xmean(F, "Stepper");
    if (cfg_.dealias) dealias_inplace(F);
    vhat_ = F.coeffs();
    t_ = t;
    have_prev_n_ = false;
  }

  RealField state() const {
    SpectralRep F(grid_);
    F.coeffs() = vhat_;
    return to_real(F);
  }

  double l2_norm_state() const {
    SpectralRep F(grid_);
    F.coeffs() = vhat_;
    return l2_norm(F);
  }

  void step() {
    switch (cfg_.scheme) {
      case SolverConfig::Scheme::etd_rk4: step_etdrk4(); break;
      case SolverConfig::Scheme::if_rk4: step_ifrk4(); break;
      case SolverConfig::Scheme::regularized_imex: step_imex(); break;
    }
    t_ += cfg_.dt;
    project_zero_mode();
    check_finite();
  }

  /// Regularized runs premultiply the data by the symbol of (1-sqrt(eps) Lap)^{-1}.
  void apply_regularized_init_smoothing() {
    const double se = std::sqrt(cfg_.reg_epsilon);
    std::size_t k = 0;
    for (int m = 0; m < grid_.nx(); ++m) {
      const double xi = grid_.xi(m);
      for (int n = 0; n < grid_.ny(); ++n, ++k) {
        const double s = xi * xi + grid_.eta(n) * grid_.eta(n);
        vhat_[k] /= 1.0 + se * s;
      }
    }
  }

  const RealField& psi() const { return psi_; }
  bool has_psi() const { return has_psi_; }

private:
  void build_coefficients() {
    const double h = cfg_.dt;
    const std::size_t n = grid_.size();
    const bool reg = cfg_.scheme == SolverConfig::Scheme::regularized_imex;
    if (reg) {
      reg_mult_.resize(n);
      std::size_t k = 0;
      for (int m = 0; m < grid_.nx(); ++m) {
        const double xi = grid_.xi(m);
        for (int j = 0; j < grid_.ny(); ++j, ++k) {
          const double s = xi * xi + grid_.eta(j) * grid_.eta(j);
          reg_mult_[k] = 1.0 / (1.0 + cfg_.reg_epsilon * s * s);
        }
      }
      cn_num_.resize(n);
      cn_den_.resize(n);
      for (std::size_t k2 = 0; k2 < n; ++k2) {
        const cplx lr = reg_mult_[k2] * cplx(0.0, theta_[k2]);
        cn_num_[k2] = 1.0 + 0.5 * h * lr;
        cn_den_[k2] = 1.0 / (1.0 - 0.5 * h * lr);
      }
      return;
    }
    e1_.resize(n);
    e2_.resize(n);
    if (cfg_.scheme == SolverConfig::Scheme::etd_rk4) {
      q_.resize(n);
      f1_.resize(n);
      f2_.resize(n);
      f3_.resize(n);
    }
    for (std::size_t k = 0; k < n; ++k) {
      const cplx z = cplx(0.0, theta_[k] * h);
      e1_[k] = std::exp(z);
      e2_[k] = std::exp(0.5 * z);
      if (cfg_.scheme != SolverConfig::Scheme::etd_rk4) continue;
      q_[k] = h * detail::contour_mean(z, [](cplx w) { return (std::exp(0.5 * w) - 1.0) / w; });
      f1_[k] = h * detail::contour_mean(z, [](cplx w) {
        return (-4.0 - w + std::exp(w) * (4.0 - 3.0 * w + w * w)) / (w * w * w);
      });
      f2_[k] = h * detail::contour_mean(z, [](cplx w) {
        return (2.0 + w + std::exp(w) * (-2.0 + w)) / (w * w * w);
      });
      f3_[k] = h * detail::contour_mean(z, [](cplx w) {
        return (-4.0 - 3.0 * w - w * w + std::exp(w) * (4.0 - w)) / (w * w * w);
      });
    }
  }

  /// Spectral nonlinear term: -i xi (v^2/2 + psi v)^hat, dealiased.
  std::vector<cplx> nonlin(const std::vector<cplx>& vh) const {
    std::vector<cplx> buf = fft_backward(grid_, vh);
    if (has_psi_) {
      for (std::size_t k = 0; k < buf.size(); ++k) {
        const double vr = buf[k].real();
        buf[k] = 0.5 * vr * vr + psi_.samples()[k] * vr;
      }
    } else {
      for (std::size_t k = 0; k < buf.size(); ++k) {
        const double vr = buf[k].real();
        buf[k] = 0.5 * vr * vr;
      }
    }
    buf = fft_forward(grid_, std::move(buf));
    const int jc = grid_.nx() / 3, kc = grid_.ny() / 3, nyqx = grid_.nx() / 2;
    std::size_t k = 0;
    for (int m = 0; m < grid_.nx(); ++m) {
      const int j = Grid::freq_index(m, grid_.nx());
      const bool kill_row = (cfg_.dealias && std::abs(j) > jc) || m == 0 || m == nyqx;
      const cplx dx = cplx(0.0, -grid_.xi(m)); // -d/dx
      for (int nn = 0; nn < grid_.ny(); ++nn, ++k) {
        if (kill_row || (cfg_.dealias && std::abs(Grid::freq_index(nn, grid_.ny())) > kc))
          buf[k] = 0.0;
        else
          buf[k] *= dx;
      }
    }
    return buf;
  }

  void step_etdrk4() {
    const std::size_t n = vhat_.size();
    std::vector<cplx> nv = nonlin(vhat_), a(n), b(n), c(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = e2_[k] * vhat_[k] + q_[k] * nv[k];
    std::vector<cplx> na = nonlin(a);
    for (std::size_t k = 0; k < n; ++k) b[k] = e2_[k] * vhat_[k] + q_[k] * na[k];
    std::vector<cplx> nb = nonlin(b);
    for (std::size_t k = 0; k < n; ++k)
      c[k] = e2_[k] * a[k] + q_[k] * (2.0 * nb[k] - nv[k]);
    std::vector<cplx> nc = nonlin(c);
    for (std::size_t k = 0; k < n; ++k)
      vhat_[k] = e1_[k] * vhat_[k] + f1_[k] * nv[k] + 2.0 * f2_[k] * (na[k] + nb[k]) +
                 f3_[k] * nc[k];
  }

  /// Integrating-factor RK4 on w = exp(-tL) vhat.
  void step_ifrk4() {
    const std::size_t n = vhat_.size();
    const double h = cfg_.dt;
    std::vector<cplx> k1 = nonlin(vhat_), u2(n);
    for (std::size_t k = 0; k < n; ++k) u2[k] = e2_[k] * (vhat_[k] + 0.5 * h * k1[k]);
    std::vector<cplx> k2 = nonlin(u2), u3(n);
    for (std::size_t k = 0; k < n; ++k) u3[k] = e2_[k] * vhat_[k] + 0.5 * h * k2[k];
    std::vector<cplx> k3 = nonlin(u3), u4(n);
    for (std::size_t k = 0; k < n; ++k) u4[k] = e1_[k] * vhat_[k] + h * e2_[k] * k3[k];
    std::vector<cplx> k4 = nonlin(u4);
    for (std::size_t k = 0; k < n; ++k)
      vhat_[k] = e1_[k] * vhat_[k] +
                 h / 6.0 *
                     (e1_[k] * k1[k] + 2.0 * e2_[k] * (k2[k] + k3[k]) + k4[k]);
  }

  /// Crank-Nicolson on the damped linear symbol, Adams-Bashforth-2 on the
  /// damped nonlinearity, per the epsilon-regularized flow.
  void step_imex() {
    const std::size_t n = vhat_.size();
    std::vector<cplx> nv = nonlin(vhat_);
    for (std::size_t k = 0; k < n; ++k) nv[k] *= reg_mult_[k];
    if (!have_prev_n_) {
      // bootstrap: Heun predictor-corrector on the damped system
      std::vector<cplx> pred(n);
      const double h = cfg_.dt;
      for (std::size_t k = 0; k < n; ++k) {
        const cplx lr = reg_mult_[k] * cplx(0.0, theta_[k]);
        pred[k] = vhat_[k] + h * (lr * vhat_[k] + nv[k]);
      }
      std::vector<cplx> npred = nonlin(pred);
      for (std::size_t k = 0; k < n; ++k) {
        const cplx lr = reg_mult_[k] * cplx(0.0, theta_[k]);
        npred[k] *= reg_mult_[k];
        vhat_[k] += 0.5 * cfg_.dt *
                    (lr * vhat_[k] + nv[k] + lr * pred[k] + npred[k]);
      }
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        const cplx rhs = cn_num_[k] * vhat_[k] +
                         cfg_.dt * (1.5 * nv[k] - 0.5 * prev_n_[k]);
        vhat_[k] = cn_den_[k] * rhs;
      }
    }
    prev_n_ = std::move(nv);
    have_prev_n_ = true;
  }

  void project_zero_mode() {
    for (int nn = 0; nn < grid_.ny(); ++nn) vhat_[nn] = 0.0;
  }

  void check_finite() const {
    double acc = 0.0;
    for (const cplx& c : vhat_) acc += std::norm(c);
    if (!std::isfinite(acc)) throw SolverInstability(t_, cfg_.dt);
  }

  Grid grid_;
  SolverConfig cfg_;
  BackgroundSpec bg_;
  std::vector<double> theta_;
  RealField psi_;
  bool has_psi_ = false;
  std::vector<cplx> vhat_;
  double t_;
  std::vector<cplx> e1_, e2_, q_, f1_, f2_, f3_;
  std::vector<double> reg_mult_;
  std::vector<cplx> cn_num_, cn_den_;
  std::vector<cplx> prev_n_;
  bool have_prev_n_ = false;
};

/// One step of the configured scheme on a materialized state.
inline SimState step(const SimState& state, const SolverConfig& cfg) {
  Stepper st(state.v.grid(), state.background, cfg);
  if (cfg.scheme == SolverConfig::Scheme::regularized_imex) {
    st.set_state(state.v, state.t);
    st.apply_regularized_init_smoothing();
  } else {
    st.set_state(state.v, state.t);
  }
  st.step();
  return SimState(st.t(), st.state(), state.background);
}

struct SimulationResult {
  SimState final_state;
  std::vector<FunctionalReport> diagnostics;
};

/// Evolve the localized perturbation v from phi to t_end, sampling
/// diagnostics and handing completed snapshots to the optional sink.
inline SimulationResult simulate(
    const RealField& phi, const BackgroundSpec& background, const SolverConfig& cfg,
    const std::function<void(const SimState&)>& snapshot_sink = {}) {
  cfg.validate();
  const Grid& g = phi.grid();
  {
    SpectralRep F = to_spectral(phi);
    require_zero_xmean(F, "simulate(phi)");
    double edge = 0.0;
    for (int j = 0; j < g.ny(); ++j) edge = std::max(edge, std::abs(phi(0, j)));
    for (int i = 0; i < g.nx(); ++i) edge = std::max(edge, std::abs(phi(i, 0)));
    if (phi.max_abs() > 0.0 && edge > 1e-8 * phi.max_abs())
      throw std::invalid_argument("simulate: phi is not localized inside the box");
  }

  Stepper st(g, background, cfg);
  st.set_state(phi, 0.0);
  if (cfg.scheme == SolverConfig::Scheme::regularized_imex) st.apply_regularized_init_smoothing();

  const RealField* psi = st.has_psi() ? &st.psi() : nullptr;
  SimulationResult out{SimState(0.0, phi, background), {}};

  const long nsteps = std::lround(cfg.t_end / cfg.dt);
  if (std::abs(nsteps * cfg.dt - cfg.t_end) > 1e-9 * std::max(1.0, cfg.t_end))
    throw std::invalid_argument("simulate: t_end must be an integer number of steps");

  auto sample = [&](long istep) {
    if (cfg.diagnostics_stride > 0 &&
        (istep % cfg.diagnostics_stride == 0 || istep == nsteps)) {
    RealField v = st.state();
      out.diagnostics.push_back(compute_report(st.t(), v, psi, cfg.hs0_order));
      if (!out.diagnostics.back().all_finite()) throw SolverInstability(st.t(), cfg.dt);
    }
    if (snapshot_sink && cfg.snapshot_stride > 0 &&
        (istep % cfg.snapshot_stride == 0 || istep == nsteps)) {
      snapshot_sink(SimState(st.t(), st.state(), background));
    }
  };

  sample(0);
  for (long i = 1; i <= nsteps; ++i) {
    st.step();
    sample(i);
  }
  out.final_state = SimState(st.t(), st.state(), background);
  return out;
}

/// The scaling symmetry u -> beta^2 u(beta^3 t, beta x, beta^2 y): the
/// lattice maps onto itself, so rescaling is exact resampling onto the
/// stretched grid lx/beta, ly/beta^2.
inline RealField rescale_solution(const RealField& v, double beta) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("rescale_solution: beta must be in (0,1]");
  const Grid& g = v.grid();
  Grid scaled(g.nx(), g.ny(), g.lx() / beta, g.ly() / (beta * beta));
  RealField out(scaled);
  const double b2 = beta * beta;
  for (std::size_t k = 0; k < g.size(); ++k) out.samples()[k] = b2 * v.samples()[k];
  return out;
}

/// Pointwise L2 distance between two sampled runs plus the accumulated
/// sup-norm integrals entering the two-solution stability bound.
struct GapReport {
  std::vector<double> t;
  std::vector<double> gap;     // ||v_a - v_b||_L2 at each sample
  std::vector<double> k_accum; // int_0^t (||dx v_a||_inf + ||dx v_b||_inf) + t ||psi_x||_inf
};

inline GapReport stability_gap(const std::vector<SimState>& run_a,
                               const std::vector<SimState>& run_b) {
  if (run_a.size() != run_b.size() || run_a.empty())
    throw std::invalid_argument("stability_gap: sampling mismatch");
  GapReport rep;
  const Grid& g = run_a.front().v.grid();
  double psix_inf = 0.0;
  {
    const BackgroundSpec& bg = run_a.front().background;
    if (bg.kind != BackgroundSpec::Kind::none)
      psix_inf = derivative(bg.profile(g), 'x', 1).max_abs();
  }
  double accum = 0.0, prev_rate = 0.0, prev_t = 0.0;
  for (std::size_t i = 0; i < run_a.size(); ++i) {
    const SimState& a = run_a[i];
    const SimState& b = run_b[i];
    if (std::abs(a.t - b.t) > 1e-12 * std::max(1.0, std::abs(a.t)) || a.v.grid() != g ||
        b.v.grid() != g)
      throw std::invalid_argument("stability_gap: sampling mismatch");
    RealField d = a.v - b.v;
    rep.t.push_back(a.t);
    rep.gap.push_back(lebesgue_norm(d, 2.0));
    const double rate =
        derivative(a.v, 'x', 1).max_abs() + derivative(b.v, 'x', 1).max_abs();
    if (i > 0) accum += 0.5 * (rate + prev_rate) * (a.t - prev_t);
    rep.k_accum.push_back(accum + a.t * psix_inf);
    prev_rate = rate;
    prev_t = a.t;
  }
  return rep;
}

} // namespace kpiwave
