#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpiwave/solver.hpp"

namespace kpiwave {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; big-endian hosts unsupported");

/// Binary state snapshot.  Layout (little-endian):
///   magic "KPI1", version u32, nx u32, ny u32,
///   lx f64, ly f64, t f64, c f64, alpha f64, beta f64, delta f64,
///   frame_speed f64, then nx*ny f64 samples of v, row-major (y fastest).
/// The background kind is encoded by its parameters: alpha > 0 is a Zaitsev
/// wave, else c > 0 is the line soliton, else no background.
struct Snapshot {
  SimState state;
  double frame_speed = 0.0;
};

inline constexpr char snapshot_magic[4] = {'K', 'P', 'I', '1'};
inline constexpr std::uint32_t snapshot_version = 1;

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};

template <class T>
void put(std::vector<unsigned char>& buf, const T& v) {
  const auto* p = reinterpret_cast<const unsigned char*>(&v);
  buf.insert(buf.end(), p, p + sizeof(T));
}

template <class T>
T take(const unsigned char*& p, const unsigned char* end) {
  if (p + sizeof(T) > end) throw std::runtime_error("snapshot: truncated header");
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

} // namespace detail

inline void write_snapshot(const Snapshot& snap, const std::string& path) {
  const Grid& g = snap.state.v.grid();
  const BackgroundSpec& bg = snap.state.background;

  std::vector<unsigned char> buf;
  buf.reserve(48 + g.size() * sizeof(double));
  buf.insert(buf.end(), snapshot_magic, snapshot_magic + 4);
  detail::put(buf, snapshot_version);
  detail::put(buf, static_cast<std::uint32_t>(g.nx()));
  detail::put(buf, static_cast<std::uint32_t>(g.ny()));
  detail::put(buf, g.lx());
  detail::put(buf, g.ly());
  detail::put(buf, snap.state.t);
  detail::put(buf, bg.c);
  detail::put(buf, bg.alpha);
  detail::put(buf, bg.beta);
  detail::put(buf, bg.delta);
  detail::put(buf, snap.frame_speed);
  const auto* s = reinterpret_cast<const unsigned char*>(snap.state.v.samples().data());
  buf.insert(buf.end(), s, s + g.size() * sizeof(double));

  // atomic: write sidecar then rename over the target
  const std::string tmp = path + ".tmp";
  {
    std::unique_ptr<std::FILE, detail::FileCloser> f(std::fopen(tmp.c_str(), "wb"));
    if (!f) throw std::runtime_error("write_snapshot: cannot open " + tmp);
    if (std::fwrite(buf.data(), 1, buf.size(), f.get()) != buf.size())
      throw std::runtime_error("write_snapshot: short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline Snapshot read_snapshot(const std::string& path) {
  std::unique_ptr<std::FILE, detail::FileCloser> f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("read_snapshot: cannot open " + path);
  std::fseek(f.get(), 0, SEEK_END);
  const long sz = std::ftell(f.get());
  std::fseek(f.get(), 0, SEEK_SET);
  std::vector<unsigned char> buf(sz > 0 ? static_cast<std::size_t>(sz) : 0);
  if (std::fread(buf.data(), 1, buf.size(), f.get()) != buf.size())
    throw std::runtime_error("read_snapshot: short read from " + path);

  const unsigned char* p = buf.data();
  const unsigned char* end = p + buf.size();
  if (buf.size() < 4 || std::memcmp(p, snapshot_magic, 4) != 0)
    throw std::runtime_error("read_snapshot: magic mismatch (not a KPI1 file)");
  p += 4;
  const auto version = detail::take<std::uint32_t>(p, end);
  if (version != snapshot_version)
    throw std::runtime_error("read_snapshot: unsupported version " + std::to_string(version));
  const auto nx = detail::take<std::uint32_t>(p, end);
  const auto ny = detail::take<std::uint32_t>(p, end);
  const double lx = detail::take<double>(p, end);
  const double ly = detail::take<double>(p, end);
  const double t = detail::take<double>(p, end);
  const double c = detail::take<double>(p, end);
  const double alpha = detail::take<double>(p, end);
  const double beta = detail::take<double>(p, end);
  const double delta = detail::take<double>(p, end);
  const double frame_speed = detail::take<double>(p, end);

  Grid g(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
  const std::size_t want = g.size() * sizeof(double);
  const std::size_t have = static_cast<std::size_t>(end - p);
  if (have != want)
    throw std::runtime_error("read_snapshot: payload is " + std::to_string(have) +
                             " bytes, expected " + std::to_string(want));

  BackgroundSpec bg;
  if (alpha > 0.0)
    bg = BackgroundSpec::zaitsev_wave(alpha, beta, delta);
  else if (c > 0.0)
    bg = BackgroundSpec::kdv_line(c);

  RealField v(g);
  std::memcpy(v.samples().data(), p, want);
  return Snapshot{SimState(t, std::move(v), bg), frame_speed};
}

} // namespace kpiwave
