// kpiwave: pseudo-spectral KP-I simulator and verification harness.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>

#include "kpiwave/config.hpp"
#include "kpiwave/diagnostics.hpp"
#include "kpiwave/dispersion.hpp"
#include "kpiwave/experiments.hpp"
#include "kpiwave/snapshot.hpp"

using namespace kpiwave;

namespace {

int cmd_simulate(const std::string& config_path) {
  ExperimentConfig cfg = load_config(config_path);
  const Grid g = cfg.grid();
  BackgroundSpec bg = cfg.background();

  std::filesystem::create_directories(cfg.out_dir);
  int snap_index = 0;
  auto sink = [&](const SimState& st) {
    char leaf[64];
    std::snprintf(leaf, sizeof leaf, "%s_%05d.snap", cfg.prefix.c_str(), snap_index++);
    write_snapshot(Snapshot{st, cfg.solver.frame_speed},
                   (std::filesystem::path(cfg.out_dir) / leaf).string());
  };

  auto sim = simulate(cfg.initial_data(g), bg, cfg.solver,
                      cfg.solver.snapshot_stride > 0 ? std::function<void(const SimState&)>(sink)
                                                     : std::function<void(const SimState&)>{});
  if (!sim.diagnostics.empty())
    write_diagnostics(sim.diagnostics,
                      (std::filesystem::path(cfg.out_dir) / (cfg.prefix + "_diagnostics.csv"))
                          .string());
  std::printf("simulated %s to t = %.6f (%d snapshots, %zu diagnostic rows)\n",
              cfg.experiment.c_str(), sim.final_state.t, snap_index, sim.diagnostics.size());
  return 0;
}

int cmd_check(const std::string& config_path) {
  ExperimentConfig cfg = load_config(config_path);
  ExperimentResult res = run_experiment(cfg);
  print_summary(res);
  return res.ok() ? 0 : 1;
}

int cmd_profile(const std::string& kind, double alpha, double beta, double c, double delta,
                int nx, int ny, double lx, double ly, const std::string& out) {
  BackgroundSpec bg;
  if (kind == "kdv") {
    bg = BackgroundSpec::kdv_line(c);
  } else if (kind == "zaitsev") {
    bg = BackgroundSpec::zaitsev_wave(alpha, beta, delta);
    // fit the box to an integer number of transverse periods
    ly = std::max(1.0, std::round(ly * bg.delta / (2.0 * pi))) * 2.0 * pi / bg.delta;
    std::printf("zaitsev: c = %.12g, delta = %.12g, ly fitted to %.12g\n", bg.c, bg.delta, ly);
  } else {
    std::fprintf(stderr, "profile: kind must be kdv or zaitsev\n");
    return 2;
  }
  Grid g(nx, ny, lx, ly);
  RealField psi = bg.profile(g);
  std::printf("traveling residual: %.6e\n", traveling_residual(psi, bg.c));
  write_snapshot(Snapshot{SimState(0.0, std::move(psi), bg), bg.c}, out);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_functionals(const std::string& snap_path) {
  Snapshot snap = read_snapshot(snap_path);
  const Grid& g = snap.state.v.grid();
  RealField psi = snap.state.background.profile(g);
  const bool has_psi = snap.state.background.kind != BackgroundSpec::Kind::none;
  FunctionalReport r =
      compute_report(snap.state.t, snap.state.v, has_psi ? &psi : nullptr);
  std::printf("%s\n", diagnostics_header);
  std::printf("%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e\n", r.t, r.m, r.e,
              r.fpsi, r.z_norm, r.x_norm, r.hs0_norm, r.linf_u, r.linf_ux, r.linf_uy);
  return 0;
}

int cmd_probe(double q, double r, double eps, double T, int nt, int samples,
              std::uint64_t seed, int n, double box) {
  Grid g(n, n, box, box);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, acc = 0.0;
  std::vector<double> vals(samples);
  parallel_for(vals.size(), [&](std::size_t i) {
    RealField phi = seeded_bump_field(g, CounterRng{seed}.child(i), 1.0, 1.5);
    vals[i] = strichartz_quotient(phi, q, r, eps, T, nt);
  });
  for (double v : vals) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    acc += v;
  }
  std::printf("eps,q,r,T,nt,samples,nx,ny,mean,min,max\n");
  std::printf("%.6g,%.6g,%.6g,%.6g,%d,%d,%d,%d,%.10e,%.10e,%.10e\n", eps, q, r, T, nt, samples,
              g.nx(), g.ny(), acc / samples, lo, hi);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral KP-I simulator and verification suite"};
  app.require_subcommand(1);

  std::string config_path, snap_path, out_path = "profile.snap", kind = "kdv";
  double alpha = 1.0, beta = 0.5, c = 1.0, delta = -1.0;
  int nx = 512, ny = 64;
  double lx = 32.0 * pi, ly = 2.0 * pi;
  double q = std::numeric_limits<double>::infinity(), r = 2.0, eps = 0.0, T = 1.0;
  int nt = 64, samples = 1, n = 128;
  double box = 16.0 * pi;
  std::uint64_t seed = 1;

  auto* sim = app.add_subcommand("simulate", "run a configured experiment's simulation");
  sim->add_option("config", config_path, "experiment config file")->required();

  auto* chk = app.add_subcommand("check-invariants", "run the named experiment's assertions");
  chk->add_option("config", config_path, "experiment config file")->required();

  auto* prof = app.add_subcommand("profile", "emit a traveling-wave profile snapshot");
  prof->add_option("--kind", kind, "kdv | zaitsev");
  prof->add_option("--alpha", alpha, "Zaitsev alpha");
  prof->add_option("--beta", beta, "Zaitsev beta");
  prof->add_option("--c", c, "line-soliton speed");
  prof->add_option("--delta", delta, "Zaitsev delta (< 0: solve numerically)");
  prof->add_option("--nx", nx);
  prof->add_option("--ny", ny);
  prof->add_option("--lx", lx);
  prof->add_option("--ly", ly, "fitted to whole periods for zaitsev");
  prof->add_option("--out", out_path, "output snapshot path");

  auto* fn = app.add_subcommand("functionals", "print the diagnostics row of a snapshot");
  fn->add_option("snapshot", snap_path, "snapshot file")->required();

  auto* probe = app.add_subcommand("probe-strichartz", "sample the space-time quotient");
  probe->add_option("--q", q, "time exponent (inf allowed)");
  probe->add_option("--r", r, "space exponent (2 or inf supported exactly)");
  probe->add_option("--eps", eps, "smoothing exponent in [0, 1/2]");
  probe->add_option("--T", T, "time horizon");
  probe->add_option("--nt", nt, "time samples");
  probe->add_option("--samples", samples, "Monte-Carlo sample count");
  probe->add_option("--seed", seed, "base seed");
  probe->add_option("--n", n, "grid points per side");
  probe->add_option("--box", box, "box side length");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path);
    if (chk->parsed()) return cmd_check(config_path);
    if (prof->parsed())
      return cmd_profile(kind, alpha, beta, c, delta, nx, ny, lx, ly, out_path);
    if (fn->parsed()) return cmd_functionals(snap_path);
    if (probe->parsed()) return cmd_probe(q, r, eps, T, nt, samples, seed, n, box);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
