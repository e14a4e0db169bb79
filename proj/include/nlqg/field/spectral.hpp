#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "nlqg/error.hpp"
#include "nlqg/field/fft.hpp"
#include "nlqg/field/wave_field.hpp"

namespace nlqg {

/// Which coordinates a two-particle operator acts on.
enum class Particle { first, second, all };

namespace detail {

inline void check_finite(const WaveField& f) {
  require(f.all_finite(), "wave field contains non-finite values");
}

inline void check_axis(const WaveField& f, int axis) {
  require(axis >= 0 && axis < f.rank(),
          "axis " + std::to_string(axis) + " out of range for a rank-" +
              std::to_string(f.rank()) + " field");
}

/// Index of the wavenumber along `axis` for flat position `idx`.
inline std::size_t axis_index(std::size_t idx, std::size_t n, int rank, int axis) {
  if (rank == 1) return idx;
  return axis == 0 ? idx / n : idx % n;
}

}  // namespace detail

/// First and second spectral derivatives along one axis, sharing a single
/// forward transform. The Nyquist mode is dropped from the first derivative
/// (it has no consistent sign) and kept, as -k_N^2, in the second.
struct AxisDerivatives {
  WaveField first;
  WaveField second;
};

inline AxisDerivatives axis_derivatives(const WaveField& field, int axis) {
  detail::check_axis(field, axis);
  const GridSpec& g = field.grid();
  const std::size_t n = g.points;
  const int rank = field.rank();

  WaveField hat = field;
  fft::transform_axis(hat.values(), n, rank, axis, fft::Direction::forward);

  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> ik(n), k2(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double k = g.wavenumber(m);
    ik[m] = g.is_nyquist(m) ? 0.0 : k * inv_n;
    k2[m] = -k * k * inv_n;
  }
  AxisDerivatives out{hat, hat};
  auto* first = out.first.values().data();
  auto* second = out.second.values().data();
  for (std::size_t idx = 0; idx < hat.size(); ++idx) {
    const std::size_t m = detail::axis_index(idx, n, rank, axis);
    first[idx] = Complex{-first[idx].imag() * ik[m], first[idx].real() * ik[m]};
    second[idx] *= k2[m];
  }
  fft::transform_axis(out.first.values(), n, rank, axis, fft::Direction::backward);
  fft::transform_axis(out.second.values(), n, rank, axis, fft::Direction::backward);
  return out;
}

/// Spectral derivative d/dx_axis (multiplication by ik in Fourier space).
inline WaveField gradient(const WaveField& field, int axis) {
  detail::check_finite(field);
  detail::check_axis(field, axis);
  const GridSpec& g = field.grid();
  const std::size_t n = g.points;
  const int rank = field.rank();

  WaveField out = field;
  fft::transform_axis(out.values(), n, rank, axis, fft::Direction::forward);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const std::size_t m = detail::axis_index(idx, n, rank, axis);
    out[idx] *= g.is_nyquist(m) ? Complex{} : Complex{0.0, g.wavenumber(m) * inv_n};
  }
  fft::transform_axis(out.values(), n, rank, axis, fft::Direction::backward);
  return out;
}

/// Axes belonging to the selected particle. A one-particle field accepts
/// `first` or `all`, both meaning every axis.
inline std::vector<int> particle_axes(const WaveField& field, Particle which) {
  if (field.particle_count() == 1) {
    require(which != Particle::second, "a one-particle field has no second particle");
    std::vector<int> axes(static_cast<std::size_t>(field.rank()));
    for (int a = 0; a < field.rank(); ++a) axes[static_cast<std::size_t>(a)] = a;
    return axes;
  }
  switch (which) {
    case Particle::first: return {0};
    case Particle::second: return {1};
    case Particle::all: return {0, 1};
  }
  return {};
}

/// Spectral Laplacian (-|k|^2) over the selected particle's coordinates.
inline WaveField laplacian(const WaveField& field, Particle which = Particle::all) {
  detail::check_finite(field);
  const GridSpec& g = field.grid();
  const std::size_t n = g.points;
  const int rank = field.rank();

  WaveField out(g, field.particle_count());
  for (int axis : particle_axes(field, which)) {
    WaveField part = field;
    fft::transform_axis(part.values(), n, rank, axis, fft::Direction::forward);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t idx = 0; idx < part.size(); ++idx) {
      const double k = g.wavenumber(detail::axis_index(idx, n, rank, axis));
      part[idx] *= -k * k * inv_n;
    }
    fft::transform_axis(part.values(), n, rank, axis, fft::Direction::backward);
    out += part;
  }
  return out;
}

/// Discretized integral of conj(f) g; conjugate-linear in the first slot.
inline Complex inner_product(const WaveField& f, const WaveField& g) {
  require(f.same_shape(g), "inner_product: fields live on different grids");
  Complex acc{};
  for (std::size_t i = 0; i < f.size(); ++i) acc += std::conj(f[i]) * g[i];
  return acc * f.cell_volume();
}

}  // namespace nlqg
