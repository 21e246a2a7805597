#pragma once

#include <cstdio>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpiwave/functionals.hpp"

namespace kpiwave {

inline constexpr const char* diagnostics_header =
    "t,M,E,Fpsi,Znorm,Xnorm,Hs0,Linf_u,Linf_ux,Linf_uy";

/// CSV diagnostics, 17 significant digits, rows strictly increasing in t.
inline void write_diagnostics(const std::vector<FunctionalReport>& reports,
                              const std::string& path) {
  if (reports.empty()) throw std::invalid_argument("write_diagnostics: empty report list");
  for (std::size_t i = 1; i < reports.size(); ++i)
    if (!(reports[i].t > reports[i - 1].t))
      throw std::invalid_argument("write_diagnostics: t not strictly increasing at row " +
                                  std::to_string(i));
  struct Closer {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
  };
  const std::string tmp = path + ".tmp";
  {
    std::unique_ptr<std::FILE, Closer> f(std::fopen(tmp.c_str(), "wb"));
    if (!f) throw std::runtime_error("write_diagnostics: cannot open " + tmp);
    std::fprintf(f.get(), "%s\n", diagnostics_header);
    for (const FunctionalReport& r : reports)
      std::fprintf(f.get(),
                   "%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e\n", r.t, r.m,
                   r.e, r.fpsi, r.z_norm, r.x_norm, r.hs0_norm, r.linf_u, r.linf_ux, r.linf_uy);
  }
  std::filesystem::rename(tmp, path);
}

/// Parse a diagnostics CSV back into reports (tests and the gap probes).
inline std::vector<FunctionalReport> read_diagnostics(const std::string& path) {
  struct Closer {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
  };
  std::unique_ptr<std::FILE, Closer> f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("read_diagnostics: cannot open " + path);
  char line[1024];
  if (!std::fgets(line, sizeof line, f.get()))
    throw std::runtime_error("read_diagnostics: empty file");
  std::vector<FunctionalReport> out;
  while (std::fgets(line, sizeof line, f.get())) {
    FunctionalReport r;
    if (std::sscanf(line, "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r.t, &r.m, &r.e, &r.fpsi,
                    &r.z_norm, &r.x_norm, &r.hs0_norm, &r.linf_u, &r.linf_ux,
                    &r.linf_uy) != 10)
      throw std::runtime_error("read_diagnostics: malformed row in " + path);
    out.push_back(r);
  }
  return out;
}

} // namespace kpiwave
