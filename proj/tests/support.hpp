#pragma once

#include <complex>
#include <random>

#include "nlqg/field/fft.hpp"
#include "nlqg/field/wave_field.hpp"

namespace nlqg::test {

/// Smooth random field: a few random gaussian bumps with random phases,
/// normalized. The bumps sit well inside the box so the field is periodic to
/// roundoff. Seeded, so every run sees the same fields.
inline WaveField random_field(const GridSpec& g, int particles, unsigned seed, int bumps = 4) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> pos(-0.12 * g.length, 0.12 * g.length);
  std::uniform_real_distribution<double> width(0.04 * g.length, 0.07 * g.length);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> wave(-1.5, 1.5);
  struct Bump {
    double xa, xb, wa, wb, ka, kb;
    std::complex<double> amp;
  };
  std::vector<Bump> list;
  for (int i = 0; i < bumps; ++i)
    list.push_back({pos(rng), pos(rng), width(rng), width(rng), wave(rng), wave(rng),
                    std::polar(1.0, phase(rng))});
  auto one = [](double x, double c, double w, double k) {
    return std::exp(Complex{-(x - c) * (x - c) / (2.0 * w * w), k * x});
  };
  WaveField f = particles == 1 && g.dim == 1
                    ? sample_field(g, 1,
                                   [&](double x) {
                                     Complex v{};
                                     for (const auto& b : list) v += b.amp * one(x, b.xa, b.wa, b.ka);
                                     return v;
                                   })
                    : sample_field(g, particles, [&](double x, double y) {
                        Complex v{};
                        for (const auto& b : list)
                          v += b.amp * one(x, b.xa, b.wa, b.ka) * one(y, b.xb, b.wb, b.kb);
                        return v;
                      });
  f.normalize();
  return f;
}

/// Normalized gaussian (2 pi sigma^2)^{-1/4} exp(-(x - x0)^2 / 4 sigma^2 + i k0 x).
inline WaveField gaussian(const GridSpec& g, double x0, double sigma, double k0 = 0.0) {
  WaveField f = sample_field(g, 1, [&](double x) {
    return std::exp(Complex{-(x - x0) * (x - x0) / (4.0 * sigma * sigma), k0 * x});
  });
  f.normalize();
  return f;
}

/// Exact free propagation exp(-i hbar k^2 t / 2m) in Fourier space.
inline WaveField free_propagate(const WaveField& psi, double t, double hbar = 1.0, double mass = 1.0) {
  WaveField out = psi;
  const GridSpec& g = psi.grid();
  fft::transform_axis(out.values(), g.points, 1, 0, fft::Direction::forward);
  for (std::size_t i = 0; i < g.points; ++i) {
    const double k = g.wavenumber(i);
    out[i] *= std::polar(1.0 / static_cast<double>(g.points), -hbar * k * k * t / (2.0 * mass));
  }
  fft::transform_axis(out.values(), g.points, 1, 0, fft::Direction::backward);
  return out;
}

inline double max_abs_diff(const WaveField& a, const WaveField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const WaveField& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

}  // namespace nlqg::test
