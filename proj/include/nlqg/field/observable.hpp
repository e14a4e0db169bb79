#pragma once

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "nlqg/error.hpp"
#include "nlqg/field/fft.hpp"
#include "nlqg/field/spectral.hpp"
#include "nlqg/field/wave_field.hpp"

namespace nlqg {

/// A self-adjoint operator given as a real multiplier, either of position
/// or of the discrete wavenumber. Momentum samples are in FFT order.
struct Observable {
  enum class Kind { position, momentum };

  Kind kind = Kind::position;
  GridSpec grid{};
  std::vector<double> samples;

  void validate_for(const WaveField& f) const {
    require(f.grid() == grid, "observable and field grids differ");
    require(samples.size() == grid.node_count(), "observable sample count does not match grid");
    for (double v : samples) require(std::isfinite(v), "observable samples must be finite");
  }

  /// B(x) on a 1D grid or B(x, y) on a 2D grid.
  template <class Fn>
  static Observable position(const GridSpec& g, Fn&& fn) {
    return tabulate(Kind::position, g, [&](std::size_t i) { return g.coordinate(i); }, fn);
  }

  /// B(k) or B(kx, ky), with k the discrete wavenumber.
  template <class Fn>
  static Observable momentum(const GridSpec& g, Fn&& fn) {
    return tabulate(Kind::momentum, g, [&](std::size_t i) { return g.wavenumber(i); }, fn);
  }

  static Observable identity(const GridSpec& g) {
    return Observable{Kind::position, g, std::vector<double>(g.node_count(), 1.0)};
  }

  /// Same operator shifted by c times the identity.
  Observable shifted(double c) const {
    Observable out = *this;
    for (double& v : out.samples) v += c;
    return out;
  }

 private:
  template <class Coord, class Fn>
  static Observable tabulate(Kind kind, const GridSpec& g, Coord&& coord, Fn&& fn) {
    g.validate();
    Observable o{kind, g, {}};
    o.samples.resize(g.node_count());
    if constexpr (std::is_invocable_v<Fn, double>) {
      require(g.dim == 1, "observable on a 2D grid needs B(x, y)");
      for (std::size_t i = 0; i < g.points; ++i) o.samples[i] = fn(coord(i));
    } else {
      require(g.dim == 2, "observable on a 1D grid needs B(x)");
      for (std::size_t i = 0; i < g.points; ++i)
        for (std::size_t j = 0; j < g.points; ++j)
          o.samples[i * g.points + j] = fn(coord(i), coord(j));
    }
    return o;
  }
};

/// B psi for a one-particle field.
inline WaveField apply(const Observable& obs, const WaveField& field) {
  require(field.particle_count() == 1, "apply: expects a one-particle field");
  obs.validate_for(field);
  WaveField out = field;
  if (obs.kind == Observable::Kind::position) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= obs.samples[i];
    return out;
  }
  const std::size_t n = field.extent();
  const int rank = field.rank();
  fft::transform_all(out.values(), n, rank, fft::Direction::forward);
  const double inv = 1.0 / static_cast<double>(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= obs.samples[i] * inv;
  fft::transform_all(out.values(), n, rank, fft::Direction::backward);
  return out;
}

/// (I (x) B) Phi: B acts on particle b (axis 1) of a two-particle field.
inline WaveField apply_to_b(const Observable& obs, const WaveField& pair) {
  require(pair.particle_count() == 2, "apply_to_b: expects a two-particle field");
  require(obs.grid == pair.grid() && obs.samples.size() == pair.extent(),
          "apply_to_b: observable must live on the 1D single-particle grid");
  const std::size_t n = pair.extent();
  WaveField out = pair;
  if (obs.kind == Observable::Kind::position) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) *= obs.samples[j];
    return out;
  }
  fft::transform_axis(out.values(), n, 2, 1, fft::Direction::forward);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) *= obs.samples[j] * inv;
  fft::transform_axis(out.values(), n, 2, 1, fft::Direction::backward);
  return out;
}

namespace detail {
inline void require_normalized(const WaveField& f, const char* who) {
  const double n2 = f.norm_squared();
  require(std::abs(n2 - 1.0) <= 1e-8, std::string(who) +
                                          ": field must be normalized to 1 +- 1e-8 (norm^2 = " +
                                          std::to_string(n2) + "); normalize first");
}
}  // namespace detail

/// <psi, B psi> for a normalized one-particle field.
inline double expectation(const WaveField& field, const Observable& obs) {
  detail::require_normalized(field, "expectation");
  obs.validate_for(field);
  if (obs.kind == Observable::Kind::position) {
    double acc = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) acc += obs.samples[i] * std::norm(field[i]);
    return acc * field.cell_volume();
  }
  WaveField hat = field;
  fft::transform_all(hat.values(), field.extent(), field.rank(), fft::Direction::forward);
  double acc = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) acc += obs.samples[i] * std::norm(hat[i]);
  // Parseval: sum |psi|^2 = sum |psi_hat|^2 / N_total
  return acc * field.cell_volume() / static_cast<double>(hat.size());
}

/// <Phi, (I (x) B) Phi> for a normalized two-particle field.
inline double expectation_b(const WaveField& pair, const Observable& obs) {
  detail::require_normalized(pair, "expectation_b");
  return inner_product(pair, apply_to_b(obs, pair)).real();
}

}  // namespace nlqg
