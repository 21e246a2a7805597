#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "kpiwave/field.hpp"
#include "kpiwave/grid.hpp"

namespace kpiwave {

namespace detail {

/// One forward/backward c2c plan pair per grid shape.  FFTW's planner is not
/// thread-safe, so plan creation is serialized; execution on caller-owned
/// buffers (fftw_execute_dft) is safe concurrently.
class FftPlans {
public:
  static const FftPlans& get(int nx, int ny) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<FftPlans>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{nx, ny}];
    if (!slot) slot.reset(new FftPlans(nx, ny));
    return *slot;
  }

  void forward(cplx* in, cplx* out) const {
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(in),
                     reinterpret_cast<fftw_complex*>(out));
  }
  void backward(cplx* in, cplx* out) const {
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(in),
                     reinterpret_cast<fftw_complex*>(out));
  }

private:
  FftPlans(int nx, int ny) {
    std::vector<cplx> buf(static_cast<std::size_t>(nx) * ny);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    // FFTW_ESTIMATE keeps planning deterministic and cheap; the transforms
    // themselves are bit-reproducible for a fixed plan.
    fwd_ = fftw_plan_dft_2d(nx, ny, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(nx, ny, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw std::runtime_error("FFTW planning failed");
  }

  fftw_plan fwd_;
  fftw_plan bwd_;
};

} // namespace detail

/// Forward transform of a complex-valued grid function (used by the
/// conservation-density recursion, which leaves the real cone).
inline std::vector<cplx> fft_forward(const Grid& g, std::vector<cplx> data) {
  if (data.size() != g.size()) throw std::invalid_argument("fft_forward: size mismatch");
  const auto& plans = detail::FftPlans::get(g.nx(), g.ny());
  plans.forward(data.data(), data.data());
  const double scale = 1.0 / static_cast<double>(g.size());
  for (int m = 0; m < g.nx(); ++m)
    for (int n = 0; n < g.ny(); ++n) {
      // Phase referencing the transform to x=-lx/2, y=-ly/2 sample origin.
      const double sign = ((m + n) & 1) ? -1.0 : 1.0;
      data[static_cast<std::size_t>(m) * g.ny() + n] *= sign * scale;
    }
  return data;
}

inline std::vector<cplx> fft_backward(const Grid& g, std::vector<cplx> coeffs) {
  if (coeffs.size() != g.size()) throw std::invalid_argument("fft_backward: size mismatch");
  for (int m = 0; m < g.nx(); ++m)
    for (int n = 0; n < g.ny(); ++n) {
      const double sign = ((m + n) & 1) ? -1.0 : 1.0;
      coeffs[static_cast<std::size_t>(m) * g.ny() + n] *= sign;
    }
  const auto& plans = detail::FftPlans::get(g.nx(), g.ny());
  plans.backward(coeffs.data(), coeffs.data());
  return coeffs;
}

inline SpectralRep to_spectral(const RealField& f) {
  const Grid& g = f.grid();
  std::vector<cplx> buf(g.size());
  for (std::size_t k = 0; k < buf.size(); ++k) buf[k] = f.samples()[k];
  buf = fft_forward(g, std::move(buf));
  SpectralRep F(g);
  F.coeffs() = std::move(buf);
  return F;
}

inline RealField to_real(const SpectralRep& F) {
  const Grid& g = F.grid();
  std::vector<cplx> buf = fft_backward(g, F.coeffs());
  RealField f(g);
  for (std::size_t k = 0; k < buf.size(); ++k) f.samples()[k] = buf[k].real();
  return f;
}

/// Max |Im| of the inverse transform; diagnostic for Hermitian symmetry.
inline double to_real_imag_residual(const SpectralRep& F) {
  std::vector<cplx> buf = fft_backward(F.grid(), F.coeffs());
  double m = 0.0;
  for (const cplx& c : buf) m = std::max(m, std::abs(c.imag()));
  return m;
}

} // namespace kpiwave
