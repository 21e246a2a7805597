// Acceptance suite: one case per criterion, each printing PASS/FAIL lines.
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "kpiwave/experiments.hpp"

using namespace kpiwave;

namespace {

void report(int crit, const ExperimentResult& res) {
  for (const Assertion& a : res.assertions)
    std::printf("ACCEPT %2d %-40s measured=%.6e tol=%.3e %s\n", crit,
                (res.experiment + "/" + a.name).c_str(), a.measured, a.tolerance,
                a.pass ? "PASS" : "FAIL");
  std::fflush(stdout);
}

void line(int crit, const std::string& name, double measured, double lo, double hi, bool pass) {
  std::printf("ACCEPT %2d %-40s measured=%.6e window=[%.3e, %.3e] %s\n", crit, name.c_str(),
              measured, lo, hi, pass ? "PASS" : "FAIL");
  std::fflush(stdout);
}

const Assertion& find(const ExperimentResult& r, const std::string& name) {
  for (const Assertion& a : r.assertions)
    if (a.name == name) return a;
  throw std::logic_error("no assertion named " + name);
}

} // namespace

TEST_CASE("criterion 1: conservation audit") {
  ExperimentConfig cfg = experiment_defaults("conservation-audit");
  cfg.out_dir = "acceptance_out";
  ExperimentResult res = run_experiment(cfg);
  report(1, res);
  CHECK(find(res, "M-drift").pass);
  CHECK(find(res, "E-drift").pass);
  // Known red: the F cancellation is an R^2 identity that the periodic
  // zero-mode projection breaks at finite amplitude; measured drift sits
  // orders above the pinned tolerance.  Asserted as specified.
  CHECK(find(res, "F-drift").pass);
}

TEST_CASE("criterion 2: Zaitsev traveling-wave fidelity") {
  ExperimentConfig cfg = experiment_defaults("zaitsev-propagation");
  cfg.out_dir = "acceptance_out";
  ExperimentResult res = run_experiment(cfg);
  report(2, res);
  CHECK(find(res, "rest-residual").pass);
  CHECK(find(res, "profile-deviation").pass);
}

TEST_CASE("criteria 3+4: balance law and no-source on the line soliton") {
  ExperimentConfig cfg = experiment_defaults("line-soliton-perturbation");
  cfg.out_dir = "acceptance_out";
  ExperimentResult res = run_experiment(cfg);
  report(3, res);
  CHECK(find(res, "balance-law").pass);
  CHECK(find(res, "no-source").pass);
  CHECK(find(res, "carlos-quotient").pass);
}

TEST_CASE("criterion 4b: no source on the Zaitsev background") {
  ExperimentConfig cfg = experiment_defaults("zaitsev-propagation");
  cfg.out_dir = "acceptance_out";
  ExperimentResult res = run_experiment(cfg);
  report(4, res);
  CHECK(find(res, "no-source").pass);
}

TEST_CASE("criteria 5+6: dispersive decay and Strichartz boundedness") {
  ExperimentConfig cfg = experiment_defaults("strichartz-probe");
  cfg.out_dir = "acceptance_out";
  ExperimentResult res = run_experiment(cfg);
  report(5, res);
  for (const Assertion& a : res.assertions) CHECK(a.pass);
}

TEST_CASE("criterion 7: anisotropic Sobolev with constant 16") {
  ExperimentConfig cfg = experiment_defaults("sobolev-audit");
  cfg.out_dir = "acceptance_out";
  ExperimentResult res = run_experiment(cfg);
  report(7, res);
  CHECK(find(res, "p6-constant16").pass);
}

TEST_CASE("criterion 8: chi recursion identities") {
  ExperimentConfig cfg = experiment_defaults("chi-audit");
  cfg.out_dir = "acceptance_out";
  ExperimentResult res = run_experiment(cfg);
  report(8, res);
  CHECK(find(res, "chi3-momentum").pass);
  CHECK(find(res, "chi5-energy-spread").pass);
}

TEST_CASE("criterion 9: scaling symmetry commutes with the flow") {
  ExperimentConfig cfg = experiment_defaults("scaling-check");
  cfg.out_dir = "acceptance_out";
  ExperimentResult res = run_experiment(cfg);
  report(9, res);
  CHECK(find(res, "commute-rel-l2").pass);
}

TEST_CASE("criterion 10: two-solution stability bound") {
  ExperimentConfig cfg = experiment_defaults("stability-audit");
  cfg.out_dir = "acceptance_out";
  ExperimentResult res = run_experiment(cfg);
  report(10, res);
  for (const Assertion& a : res.assertions) CHECK(a.pass);
}

TEST_CASE("criterion 11: solver self-convergence order") {
  Grid g(64, 64, 16 * pi, 16 * pi);
  RealField phi = gaussian_x_derivative(g, 1.0, 2.0);
  SolverConfig base;
  base.t_end = 0.1;
  auto run = [&](double dt) {
    SolverConfig c = base;
    c.dt = dt;
    return simulate(phi, BackgroundSpec::none(), c).final_state.v;
  };
  RealField ref = run(0.1 / 160.0);
  RealField e1 = run(0.1 / 20.0) - ref;
  RealField e2 = run(0.1 / 40.0) - ref;
  const double order = std::log2(lebesgue_norm(e1, 2.0) / lebesgue_norm(e2, 2.0));
  const bool pass = order >= tol::order_low && order <= tol::order_high;
  line(11, "solver-order", order, tol::order_low, tol::order_high, pass);
  CHECK(pass);
}
