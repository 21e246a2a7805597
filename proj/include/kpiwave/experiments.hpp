#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "kpiwave/config.hpp"
#include "kpiwave/diagnostics.hpp"
#include "kpiwave/dispersion.hpp"
#include "kpiwave/functionals.hpp"
#include "kpiwave/parallel.hpp"
#include "kpiwave/snapshot.hpp"
#include "kpiwave/solver.hpp"

namespace kpiwave {

struct Assertion {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<Assertion> assertions;

  bool ok() const {
    for (const Assertion& a : assertions)
      if (!a.pass) return false;
    return !assertions.empty();
  }

  void add_le(const std::string& name, double measured, double tol, const std::string& note = "") {
    assertions.push_back({name, measured, tol, measured <= tol, note});
  }
  void add_range(const std::string& name, double measured, double lo, double hi,
                 const std::string& note = "") {
    Assertion a{name, measured, hi, measured >= lo && measured <= hi, note};
    assertions.push_back(a);
  }
};

inline void print_summary(const ExperimentResult& r, std::FILE* out = stdout) {
  for (const Assertion& a : r.assertions)
    std::fprintf(out, "%-44s measured=%.6e tol=%.3e %s%s%s\n",
                 (r.experiment + "/" + a.name).c_str(), a.measured, a.tolerance,
                 a.pass ? "PASS" : "FAIL", a.note.empty() ? "" : "  # ", a.note.c_str());
}

namespace detail {

inline double rel_drift(const std::vector<FunctionalReport>& reps, double FunctionalReport::*f) {
  const double ref = reps.front().*f;
  double d = 0.0;
  for (const FunctionalReport& r : reps) d = std::max(d, std::abs(r.*f - ref));
  return d / std::max(std::abs(ref), 1e-300);
}

inline std::string artifact_path(const ExperimentConfig& cfg, const std::string& leaf) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / (cfg.prefix + "_" + leaf)).string();
}

} // namespace detail

/// Criterion targets, pinned once here.
namespace tol {
inline constexpr double conservation_m = 1e-8;
inline constexpr double conservation_e = 1e-6;
inline constexpr double conservation_f = 1e-4;
inline constexpr double zaitsev_profile_dev = 1e-4;
inline constexpr double zaitsev_rest_residual = 1e-7;
inline constexpr double balance_law = 1e-3;
inline constexpr double no_source = 1e-12;
inline constexpr double decay_slope_window = 0.1;
inline constexpr double strichartz_r2 = 1e-12;
inline constexpr double strichartz_doubling = 2.0;
inline constexpr double sobolev_p6_constant = 16.0;
inline constexpr double chi3_match = 1e-10;
inline constexpr double chi5_spread = 1e-6;
inline constexpr double scaling_commute = 1e-5;
inline constexpr double stability_ratio_slack = 0.1;
inline constexpr double stability_constant_spread = 0.2;
inline constexpr double order_low = 3.7;
inline constexpr double order_high = 4.3;
} // namespace tol

// ---------------------------------------------------------------------------

inline ExperimentResult run_conservation_audit(const ExperimentConfig& cfg) {
  ExperimentResult res{cfg.experiment, {}};
  const Grid g = cfg.grid();
  auto sim = simulate(cfg.initial_data(g), BackgroundSpec::none(), cfg.solver);
  write_diagnostics(sim.diagnostics, detail::artifact_path(cfg, "diagnostics.csv"));
  res.add_le("M-drift", detail::rel_drift(sim.diagnostics, &FunctionalReport::m),
             cfg.tolerance("m_drift", tol::conservation_m));
  res.add_le("E-drift", detail::rel_drift(sim.diagnostics, &FunctionalReport::e),
             cfg.tolerance("e_drift", tol::conservation_e));
  res.add_le("F-drift", detail::rel_drift(sim.diagnostics, &FunctionalReport::fpsi),
             cfg.tolerance("f_drift", tol::conservation_f),
             "periodic-domain defect of the quartic cancellation; see README");
  return res;
}

inline ExperimentResult run_zaitsev_propagation(const ExperimentConfig& cfg) {
  ExperimentResult res{cfg.experiment, {}};
  BackgroundSpec bg = cfg.background();
  // one exact y-period per delta; the config default assumes beta = 1/2
  Grid g(cfg.nx, cfg.ny, cfg.lx, std::round(cfg.ly * bg.delta / (2.0 * pi)) * 2.0 * pi / bg.delta);
  RealField psi = bg.profile(g);

  res.add_le("rest-residual", traveling_residual(psi, bg.c),
             cfg.tolerance("rest_residual", tol::zaitsev_rest_residual));

  ExperimentConfig run = cfg;
  run.solver.frame_speed = bg.c;
  auto sim = simulate(cfg.initial_data(g), bg, run.solver);
  write_diagnostics(sim.diagnostics, detail::artifact_path(cfg, "diagnostics.csv"));

  const double psi_l2 = lebesgue_norm(psi, 2.0);
  res.add_le("profile-deviation", lebesgue_norm(sim.final_state.v, 2.0) / psi_l2,
             cfg.tolerance("profile_dev", tol::zaitsev_profile_dev));
  double max_v = 0.0;
  for (const FunctionalReport& r : sim.diagnostics) max_v = std::max(max_v, std::sqrt(r.m));
  res.add_le("no-source", max_v, cfg.tolerance("no_source", tol::no_source));
  return res;
}

inline ExperimentResult run_line_soliton_perturbation(const ExperimentConfig& cfg) {
  ExperimentResult res{cfg.experiment, {}};
  const Grid g = cfg.grid();
  BackgroundSpec bg = cfg.background();
  RealField psi = bg.profile(g);
  RealField psi_x = derivative(psi, 'x', 1);
  const double dA = g.dx() * g.dy();

  SolverConfig sc = cfg.solver;
  sc.frame_speed = bg.c;
  Stepper st(g, bg, sc);
  st.set_state(cfg.initial_data(g), 0.0);

  const long nsteps = std::lround(sc.t_end / sc.dt);
  const int stride = sc.diagnostics_stride > 0 ? sc.diagnostics_stride : 20;
  std::vector<double> ts, ms, rhs;
  std::vector<SimState> snaps;
  auto sample = [&] {
    RealField v = st.state();
    ts.push_back(st.t());
    ms.push_back(momentum(v));
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double vv = v.samples()[k];
      s += psi_x.samples()[k] * vv * vv;
    }
    rhs.push_back(-dA * s);
    snaps.emplace_back(st.t(), std::move(v), bg);
  };
  sample();
  for (long i = 1; i <= nsteps; ++i) {
    st.step();
    if (i % stride == 0 || i == nsteps) sample();
  }

  // centered-difference dM/dt against the quadratic flux at interior samples
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
    const double lhs = (ms[i + 1] - ms[i - 1]) / (ts[i + 1] - ts[i - 1]);
    worst = std::max(worst, std::abs(lhs - rhs[i]) / std::abs(rhs[i]));
  }
  res.add_le("balance-law", worst, cfg.tolerance("balance", tol::balance_law));

  ProbeReport carlos = carlos_bound_report(snaps, 0.5);
  res.add_le("carlos-quotient", carlos.observed, cfg.tolerance("carlos", 10.0));

  // no source: phi = 0 run on the same background
  {
    SolverConfig zc = sc;
    zc.diagnostics_stride = std::max(stride, 1);
    auto zero = simulate(RealField(g), bg, zc);
    double max_v = 0.0;
    for (const FunctionalReport& r : zero.diagnostics) max_v = std::max(max_v, std::sqrt(r.m));
    res.add_le("no-source", max_v, cfg.tolerance("no_source", tol::no_source));
  }
  return res;
}

inline ExperimentResult run_strichartz_probe(const ExperimentConfig& cfg) {
  ExperimentResult res{cfg.experiment, {}};

  // dispersive-decay fits on the big anisotropic grid
  {
    Grid g(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    RealField phi = cfg.initial_data(g);
    std::vector<double> ts;
    for (int i = 0; i < 16; ++i) ts.push_back(0.5 * std::pow(8.0, i / 15.0));
    for (double eps : {0.0, 0.3}) {
      const double slope = decay_exponent_fit(phi, eps, ts);
      const double target = -1.0 + eps / 3.0;
      res.add_range("decay-slope-eps" + std::to_string(eps).substr(0, 3), slope,
                    target - tol::decay_slope_window, target + tol::decay_slope_window,
                    "target " + std::to_string(target).substr(0, 6));
    }
  }

  // r = 2 unitarity
  {
    Grid g(128, 128, 16.0 * pi, 16.0 * pi);
    RealField phi = seeded_bump_field(g, CounterRng{cfg.seed}, 1.0, 1.5);
    const double q = strichartz_quotient(phi, std::numeric_limits<double>::infinity(), 2.0, 0.3,
                                         1.0, 32);
    res.add_le("r2-unitarity", std::abs(q - 1.0), tol::strichartz_r2);
  }

  // (r = inf, eps = 0.3): sup quotient stability under grid doubling
  {
    const double eps = 0.3, dr = 1.0;
    const double q = 2.0 / ((1.0 - eps / 3.0) * dr);
    auto max_quotient = [&](int n) {
      Grid g(n, n, 16.0 * pi, 16.0 * pi);
      std::vector<double> vals(100);
      parallel_for(vals.size(), [&](std::size_t i) {
        RealField phi =
            seeded_bump_field(g, CounterRng{cfg.seed}.child(i), 1.0, 1.5);
        vals[i] = strichartz_quotient(phi, q, std::numeric_limits<double>::infinity(), eps, 1.0,
                                      48);
      });
      return *std::max_element(vals.begin(), vals.end());
    };
    const double q128 = max_quotient(128);
    const double q256 = max_quotient(256);
    res.add_le("sup-quotient-doubling", q256 / q128, tol::strichartz_doubling,
               "sup at 128^2 = " + std::to_string(q128));
  }
  return res;
}

inline ExperimentResult run_scaling_check(const ExperimentConfig& cfg) {
  ExperimentResult res{cfg.experiment, {}};
  const double beta = 0.5;
  const Grid g = cfg.grid();
  RealField phi = cfg.initial_data(g);

  // simulate then rescale ...
  SolverConfig a = cfg.solver;
  const double tA = a.t_end * beta * beta * beta;
  a.t_end = tA;
  a.diagnostics_stride = 0;
  RealField ua = rescale_solution(simulate(phi, BackgroundSpec::none(), a).final_state.v, beta);

  // ... against rescale then simulate to the matched time
  SolverConfig b = cfg.solver;
  b.dt = cfg.solver.dt / (beta * beta * beta);
  b.diagnostics_stride = 0;
  RealField ub =
      simulate(rescale_solution(phi, beta), BackgroundSpec::none(), b).final_state.v;

  RealField d = ua - ub;
  res.add_le("commute-rel-l2", lebesgue_norm(d, 2.0) / lebesgue_norm(ub, 2.0),
             cfg.tolerance("commute", tol::scaling_commute));

  // ||J_x^2 phi_beta|| <= 2 sqrt(beta) ||J_x^2 phi|| on seeded fields
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 8; ++s) {
    RealField f = seeded_bump_field(g, CounterRng{cfg.seed}.child(s), 1.0, 2.0);
    const double j2 = norm_hs0(f, 2.0);
    for (double bb : {0.5, 0.25})
      worst = std::max(worst, norm_hs0(rescale_solution(f, bb), 2.0) / (std::sqrt(bb) * j2));
  }
  res.add_le("j2-rescale-ratio", worst, 2.0);
  return res;
}

inline ExperimentResult run_sobolev_audit(const ExperimentConfig& cfg) {
  ExperimentResult res{cfg.experiment, {}};
  const Grid g = cfg.grid();
  const int nsamples = static_cast<int>(cfg.tolerance("samples", 1000));

  std::vector<double> slack6(nsamples), c3(nsamples), c4(nsamples);
  parallel_for(nsamples, [&](std::size_t i) {
    RealField u = seeded_bump_field(g, CounterRng{cfg.seed}.child(i), 1.0, cfg.width);
    SobolevCheck s6 = sobolev_anisotropic_check(u, 6.0);
    const double rhs = tol::sobolev_p6_constant * std::pow(s6.ux, 4) * s6.ay * s6.ay;
    slack6[i] = s6.lhs / rhs;
    for (double p : {3.0, 4.0}) {
      SobolevCheck s = sobolev_anisotropic_check(u, p);
      const double lp = std::pow(s.lhs, 1.0 / p);
      const double bound = std::pow(s.l2, (6.0 - p) / (2.0 * p)) *
                           std::pow(s.ux, (p - 2.0) / p) * std::pow(s.ay, (p - 2.0) / (2.0 * p));
      (p == 3.0 ? c3[i] : c4[i]) = lp / bound;
    }
  });
  res.add_le("p6-constant16", *std::max_element(slack6.begin(), slack6.end()), 1.0,
             std::to_string(nsamples) + " seeded fields");
  // interpolated constants 2^{(p-2)/p} from the p=2 and p=6 endpoints
  res.add_le("p3-interpolated", *std::max_element(c3.begin(), c3.end()), std::pow(2.0, 1.0 / 3.0));
  res.add_le("p4-interpolated", *std::max_element(c4.begin(), c4.end()), std::sqrt(2.0));
  return res;
}

inline ExperimentResult run_chi_audit(const ExperimentConfig& cfg) {
  ExperimentResult res{cfg.experiment, {}};
  const Grid g = cfg.grid();
  const int nsamples = static_cast<int>(cfg.tolerance("samples", 50));

  std::vector<double> m_err(nsamples), ratio(nsamples);
  parallel_for(nsamples, [&](std::size_t i) {
    RealField u = seeded_bump_field(g, CounterRng{cfg.seed}.child(i), 1.0, cfg.width);
    const double M = momentum(u), E = energy(u);
    m_err[i] = std::abs(chi_integral(chi(u, 3)) - M) / M;
    ratio[i] = chi_integral(chi(u, 5)) / E;
  });
  res.add_le("chi3-momentum", *std::max_element(m_err.begin(), m_err.end()), tol::chi3_match);
  const double lo = *std::min_element(ratio.begin(), ratio.end());
  const double hi = *std::max_element(ratio.begin(), ratio.end());
  const double mean = 0.5 * (lo + hi);
  res.add_le("chi5-energy-spread", (hi - lo) / std::abs(mean), tol::chi5_spread,
             "recorded constant " + std::to_string(mean));
  return res;
}

inline ExperimentResult run_stability_audit(const ExperimentConfig& cfg) {
  ExperimentResult res{cfg.experiment, {}};
  const Grid g = cfg.grid();
  BackgroundSpec bg = cfg.background();
  SolverConfig sc = cfg.solver;
  sc.frame_speed = bg.c;
  sc.diagnostics_stride = 0;

  RealField base = cfg.initial_data(g);
  const int stride = sc.snapshot_stride > 0 ? sc.snapshot_stride : 50;

  auto run = [&](const RealField& phi) {
    std::vector<SimState> states;
    Stepper st(g, bg, sc);
    st.set_state(phi, 0.0);
    const long nsteps = std::lround(sc.t_end / sc.dt);
    states.emplace_back(0.0, st.state(), bg);
    for (long i = 1; i <= nsteps; ++i) {
      st.step();
      if (i % stride == 0 || i == nsteps) states.emplace_back(st.t(), st.state(), bg);
    }
    return states;
  };

  // Perturb along the transversally modulated translation mode: every seed
  // then carries an order-one projection onto the soliton's unstable band,
  // so the Gronwall fit probes growth rather than seed-dependent overlap.
  const double eta1 = 2.0 * pi / g.ly();
  auto direction = [&](std::uint64_t seed) {
    CounterRng rng{seed};
    const double xs = cfg.x0 != 0.0 ? 1.5 * rng.sym(0) : 0.0;
    const double ph = 2.0 * pi * rng.uniform(1);
    const double sq = 0.5 * std::sqrt(bg.c);
    RealField dir(g, [&](double x, double y) {
      const double th = std::tanh(sq * (x - xs));
      const double se = 1.0 - th * th;
      return -2.0 * sq * se * th * std::cos(eta1 * y + ph);
    });
    dir = project_zero_xmean(dir);
    dir *= 1.0 / dir.max_abs();
    return dir;
  };
  auto perturbed = [&](std::uint64_t seed, double size) {
    RealField gdir = direction(seed);
    RealField phi = base;
    for (std::size_t k = 0; k < g.size(); ++k) phi.samples()[k] += size * gdir.samples()[k];
    return phi;
  };

  std::vector<SimState> run0 = run(base);

  // linear-response ratio between perturbation sizes 1e-3 and 1e-4
  std::vector<SimState> run_a = run(perturbed(cfg.seed, 1e-3));
  std::vector<SimState> run_b = run(perturbed(cfg.seed, 1e-4));
  GapReport gap_a = stability_gap(run0, run_a);
  GapReport gap_b = stability_gap(run0, run_b);
  const double ratio = gap_a.gap.back() / gap_b.gap.back();
  res.add_range("gap-ratio", ratio, 10.0 * (1.0 - tol::stability_ratio_slack),
                10.0 * (1.0 + tol::stability_ratio_slack));

  // Gronwall-type envelope: regress log gap against the accumulated
  // sup-norm integral over the late half (the early samples carry the
  // seed-dependent projection transient), then verify on fresh seeds.
  auto fit_c = [](const GapReport& rep) {
    const std::size_t n = rep.t.size(), half = n / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = half; i < n; ++i) {
      const double x = rep.k_accum[i], y = std::log(rep.gap[i] / rep.gap[0]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = static_cast<double>(n - half);
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
  };
  std::vector<double> cs{fit_c(gap_a)};
  for (std::uint64_t s = 1; s <= 2; ++s) {
    GapReport rep = stability_gap(run0, run(perturbed(cfg.seed + s, 1e-3)));
    cs.push_back(fit_c(rep));
    double worst = 0.0;
    for (std::size_t i = 1; i < rep.t.size(); ++i)
      worst = std::max(worst, rep.gap[i] / (std::exp(1.2 * cs[0] * rep.k_accum[i]) * rep.gap[0]));
    res.add_le("gap-envelope-seed" + std::to_string(s), worst, 1.0,
               "single fitted K from seed 0, 20% headroom");
  }
  const double cmin = *std::min_element(cs.begin(), cs.end());
  const double cmax = *std::max_element(cs.begin(), cs.end());
  const double cmean = (cmin + cmax) / 2.0;
  res.add_le("gronwall-constant-spread", (cmax - cmin) / (2.0 * cmean),
             tol::stability_constant_spread,
             "fitted constants " + std::to_string(cs[0]) + ", " + std::to_string(cs[1]) + ", " +
                 std::to_string(cs[2]));
  return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.experiment == "conservation-audit") return run_conservation_audit(cfg);
  if (cfg.experiment == "zaitsev-propagation") return run_zaitsev_propagation(cfg);
  if (cfg.experiment == "line-soliton-perturbation") return run_line_soliton_perturbation(cfg);
  if (cfg.experiment == "strichartz-probe") return run_strichartz_probe(cfg);
  if (cfg.experiment == "scaling-check") return run_scaling_check(cfg);
  if (cfg.experiment == "sobolev-audit") return run_sobolev_audit(cfg);
  if (cfg.experiment == "chi-audit") return run_chi_audit(cfg);
  if (cfg.experiment == "stability-audit") return run_stability_audit(cfg);
  throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

} // namespace kpiwave
