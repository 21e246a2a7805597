#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpiwave/grid.hpp"
#include "kpiwave/initial_data.hpp"
#include "kpiwave/profiles.hpp"
#include "kpiwave/solver.hpp"

namespace kpiwave {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Everything a named experiment run needs, with defaults per experiment.
struct ExperimentConfig {
  std::string experiment;

  int nx = 256, ny = 256;
  double lx = 32.0 * pi, ly = 32.0 * pi;

  std::string background_kind = "none"; // none | kdv | zaitsev
  double c = 1.0;
  double alpha = 1.0;
  double beta = 0.5;
  double delta = -1.0; // < 0: solve numerically

  std::string family = "gaussian_x_derivative";
  double amplitude = 1.0;
  double width = 2.0;
  int order = 1;
  double x0 = 0.0, y0 = 0.0;
  std::uint64_t seed = 1;

  SolverConfig solver;
  bool frame_speed_set = false;

  std::string out_dir = "out";
  std::string prefix = "run";

  std::map<std::string, double> tolerances;

  BackgroundSpec background() const {
    if (background_kind == "none") return BackgroundSpec::none();
    if (background_kind == "kdv") return BackgroundSpec::kdv_line(c);
    if (background_kind == "zaitsev") return BackgroundSpec::zaitsev_wave(alpha, beta, delta);
    throw ConfigError("background.kind must be none, kdv or zaitsev, got '" + background_kind +
                      "'");
  }

  Grid grid() const { return Grid(nx, ny, lx, ly); }

  RealField initial_data(const Grid& g) const {
    return make_initial_data(g, family, amplitude, width, seed, order, x0, y0);
  }

  double tolerance(const std::string& name, double fallback) const {
    auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
  }

  void validate() const {
    if (background_kind == "zaitsev") {
      if (!(std::abs(beta) < 1.0))
        throw ConfigError("background.beta: Zaitsev wave needs |beta| < 1, got " +
                          std::to_string(beta));
      if (!(alpha > 0.0))
        throw ConfigError("background.alpha: Zaitsev wave needs alpha > 0");
    }
    if (background_kind == "kdv" && !(c > 0.0))
      throw ConfigError("background.c: line soliton needs c > 0");
    solver.validate();
    for (const auto& [k, v] : tolerances)
      if (!(v > 0.0)) throw ConfigError("tolerances." + k + " must be positive");
  }
};

namespace detail {

/// "1.5", "32pi" and "0.5pi" are all accepted grid lengths.
inline double parse_number(const std::string& raw, const std::string& where) {
  std::string s = raw;
  double factor = 1.0;
  if (s.size() > 2 && s.substr(s.size() - 2) == "pi") {
    factor = pi;
    s = s.substr(0, s.size() - 2);
    if (s.empty() || s == "+") s = "1";
    if (s == "-") s = "-1";
  }
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(where + ": cannot parse number '" + raw + "'");
  }
  if (pos != s.size()) throw ConfigError(where + ": trailing junk in number '" + raw + "'");
  return v * factor;
}

inline bool parse_bool(const std::string& raw, const std::string& where) {
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw ConfigError(where + ": expected a boolean, got '" + raw + "'");
}

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

} // namespace detail

/// Defaults for the registered experiments; the config file overlays these.
inline ExperimentConfig experiment_defaults(const std::string& name) {
  ExperimentConfig c;
  c.experiment = name;
  c.solver.diagnostics_stride = 20;
  if (name == "conservation-audit") {
    // box, data and stepping pinned by the audit definition
    c.nx = c.ny = 256;
    c.lx = c.ly = 32.0 * pi;
    c.solver.dt = 1e-3;
    c.solver.t_end = 1.0;
  } else if (name == "zaitsev-propagation") {
    c.background_kind = "zaitsev";
    c.alpha = 1.0;
    c.beta = 0.5;
    c.nx = 1024;
    c.ny = 64;
    c.lx = 20.0 * pi;
    c.ly = pi; // one 2*pi/delta period at beta = 1/2
    c.family = "zero";
    c.solver.dt = 1e-3;
    c.solver.t_end = 1.0;
  } else if (name == "line-soliton-perturbation") {
    c.background_kind = "kdv";
    c.c = 1.0;
    c.nx = 256;
    c.ny = 128;
    c.lx = 32.0 * pi;
    c.ly = 16.0 * pi;
    c.amplitude = 1e-2;
    c.x0 = 3.0;
    c.solver.dt = 1e-3;
    c.solver.t_end = 1.0;
    c.solver.snapshot_stride = 25;
  } else if (name == "strichartz-probe") {
    // flat-spectrum probe on a wide box: the decay estimate is a bound on
    // the free kernel, whose sup is carried by shrinking frequencies
    c.nx = 1024;
    c.ny = 512;
    c.lx = 320.0 * pi;
    c.ly = 160.0 * pi;
    c.family = "spectral_plateau";
    c.width = 1e9;
  } else if (name == "scaling-check") {
    // dt divides both t_end and t_end beta^3 at beta = 1/2
    c.nx = c.ny = 128;
    c.lx = c.ly = 16.0 * pi;
    c.amplitude = 0.5;
    c.solver.dt = 2.5e-4;
    c.solver.t_end = 0.25;
  } else if (name == "sobolev-audit") {
    c.nx = c.ny = 128;
    c.lx = c.ly = 16.0 * pi;
    c.width = 1.5;
  } else if (name == "chi-audit") {
    c.nx = c.ny = 128;
    c.lx = c.ly = 16.0 * pi;
    c.width = 1.5;
  } else if (name == "stability-audit") {
    // eta_1 = 1/4 sits inside the soliton's unstable transverse band
    // (neutral edge sqrt(3)c/4), so gaps grow at a genuine Gronwall rate
    c.background_kind = "kdv";
    c.c = 1.0;
    c.nx = 256;
    c.ny = 32;
    c.lx = 32.0 * pi;
    c.ly = 8.0 * pi;
    c.amplitude = 0.05;
    c.x0 = 3.0;
    c.solver.dt = 2e-3;
    c.solver.t_end = 12.0;
    c.solver.snapshot_stride = 250;
  } else {
    throw ConfigError("unknown experiment '" + name + "'");
  }
  return c;
}

inline const std::set<std::string>& registered_experiments() {
  static const std::set<std::string> names = {
      "conservation-audit", "zaitsev-propagation", "line-soliton-perturbation",
      "strichartz-probe",   "scaling-check",       "sobolev-audit",
      "chi-audit",          "stability-audit"};
  return names;
}

/// Parse the sectioned key-value config text.  Unknown sections or keys are
/// rejected by name; errors carry the line number.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);

  // first pass: collect (section, key, value, line)
  struct Entry {
    std::string section, key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::string section, line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = detail::trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError(path + ":" + std::to_string(lineno) + ": unterminated section header");
      section = detail::trim(s.substr(1, s.size() - 2));
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": key outside any section");
    entries.push_back({section, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)),
                       lineno});
  }

  // the experiment name picks the defaults, so find it first
  std::string name;
  for (const Entry& e : entries)
    if (e.section == "experiment" && e.key == "name") name = e.value;
  if (name.empty()) throw ConfigError(path + ": missing [experiment] name = ...");
  if (!registered_experiments().count(name))
    throw ConfigError(path + ": unknown experiment '" + name + "'");

  ExperimentConfig cfg = experiment_defaults(name);

  for (const Entry& e : entries) {
    const std::string where = path + ":" + std::to_string(e.line) + ": " + e.section + "." + e.key;
    auto num = [&] { return detail::parse_number(e.value, where); };
    if (e.section == "experiment") {
      if (e.key == "name") continue;
      throw ConfigError(where + ": unknown key '" + e.key + "'");
    } else if (e.section == "grid") {
      if (e.key == "nx") cfg.nx = static_cast<int>(num());
      else if (e.key == "ny") cfg.ny = static_cast<int>(num());
      else if (e.key == "lx") cfg.lx = num();
      else if (e.key == "ly") cfg.ly = num();
      else throw ConfigError(where + ": unknown key '" + e.key + "'");
    } else if (e.section == "background") {
      if (e.key == "kind") cfg.background_kind = e.value;
      else if (e.key == "c") cfg.c = num();
      else if (e.key == "alpha") cfg.alpha = num();
      else if (e.key == "beta") cfg.beta = num();
      else if (e.key == "delta") cfg.delta = num();
      else throw ConfigError(where + ": unknown key '" + e.key + "'");
    } else if (e.section == "initial") {
      if (e.key == "family") cfg.family = e.value;
      else if (e.key == "amplitude") cfg.amplitude = num();
      else if (e.key == "width") cfg.width = num();
      else if (e.key == "order") cfg.order = static_cast<int>(num());
      else if (e.key == "x0") cfg.x0 = num();
      else if (e.key == "y0") cfg.y0 = num();
      else if (e.key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(e.value));
      else throw ConfigError(where + ": unknown key '" + e.key + "'");
    } else if (e.section == "solver") {
      if (e.key == "scheme") {
        if (e.value == "etd_rk4") cfg.solver.scheme = SolverConfig::Scheme::etd_rk4;
        else if (e.value == "if_rk4") cfg.solver.scheme = SolverConfig::Scheme::if_rk4;
        else if (e.value == "regularized_imex")
          cfg.solver.scheme = SolverConfig::Scheme::regularized_imex;
        else throw ConfigError(where + ": unknown scheme '" + e.value + "'");
      } else if (e.key == "dt") cfg.solver.dt = num();
      else if (e.key == "t_end") cfg.solver.t_end = num();
      else if (e.key == "frame_speed") {
        cfg.solver.frame_speed = num();
        cfg.frame_speed_set = true;
      } else if (e.key == "dealias") cfg.solver.dealias = detail::parse_bool(e.value, where);
      else if (e.key == "reg_epsilon") cfg.solver.reg_epsilon = num();
      else if (e.key == "snapshot_stride") cfg.solver.snapshot_stride = static_cast<int>(num());
      else if (e.key == "diagnostics_stride")
        cfg.solver.diagnostics_stride = static_cast<int>(num());
      else if (e.key == "hs0_order") cfg.solver.hs0_order = num();
      else throw ConfigError(where + ": unknown key '" + e.key + "'");
    } else if (e.section == "output") {
      if (e.key == "dir") cfg.out_dir = e.value;
      else if (e.key == "prefix") cfg.prefix = e.value;
      else throw ConfigError(where + ": unknown key '" + e.key + "'");
    } else if (e.section == "tolerances") {
      cfg.tolerances[e.key] = num();
    } else {
      throw ConfigError(path + ":" + std::to_string(e.line) + ": unknown section [" + e.section +
                        "]");
    }
  }

  cfg.validate();
  // co-moving frame is the default whenever a background is active
  if (!cfg.frame_speed_set && cfg.background_kind != "none") {
    cfg.solver.frame_speed =
        cfg.background_kind == "kdv" ? cfg.c : zaitsev_speed(cfg.alpha, cfg.beta);
  }
  return cfg;
}

} // namespace kpiwave
