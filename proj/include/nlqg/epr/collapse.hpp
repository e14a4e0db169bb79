#pragma once

#include <cmath>
#include <numbers>

#include "nlqg/error.hpp"
#include "nlqg/field/wave_field.hpp"

namespace nlqg {

/// Post-measurement squared norm below which an outcome is treated as impossible.
inline constexpr double kVanishingOutcome = 1e-20;

/// Largest pointer sharpness the grid resolves: 1/sqrt(2 s) >= 2 dx.
inline double max_resolvable_sharpness(const GridSpec& g) {
  const double dx = g.spacing();
  return 1.0 / (8.0 * dx * dx);
}

namespace detail {

/// psi_b(x_b) = sum_a w(x_a) phi(x_a, x_b) dx for an L2-normalized weight w,
/// so ||psi_b||^2 is the outcome probability density. Returns it normalized.
template <class Weight>
WaveField condition_on_a(const WaveField& phi, Weight&& w, const char* who) {
  require(phi.particle_count() == 2, std::string(who) + ": expects a two-particle field");
  const GridSpec& g = phi.grid();
  const std::size_t n = g.points;
  const double dx = g.spacing();
  WaveField psi(g, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex wi = w(g.coordinate(i)) * dx;
    if (wi == Complex{}) continue;
    for (std::size_t j = 0; j < n; ++j) psi[j] += wi * phi(i, j);
  }
  const double prob = psi.norm_squared();
  if (!(prob > kVanishingOutcome))
    throw ValidationError(std::string(who) +
                          ": vanishing post-measurement norm (outcome has negligible amplitude)");
  psi.normalize();
  return psi;
}

}  // namespace detail

/// State of b after a gaussian position measurement of a with outcome q and
/// sharpness s: the pointer amplitude is (2s/pi)^{1/4} exp(-s (x_a - q)^2).
inline WaveField collapse_position(const WaveField& phi, double q, double s) {
  require(std::isfinite(q) && std::isfinite(s) && s > 0.0, "collapse_position: s must be > 0");
  require(s <= max_resolvable_sharpness(phi.grid()) * (1.0 + 1e-12),
          "collapse_position: pointer width 1/sqrt(2s) must cover at least 2 grid cells");
  const double amp = std::pow(2.0 * s / std::numbers::pi, 0.25);
  return detail::condition_on_a(
      phi, [&](double x) { return Complex{amp * std::exp(-s * (x - q) * (x - q))}; },
      "collapse_position");
}

/// True when wavenumber k is one of the grid's discrete momenta (below Nyquist).
inline bool is_commensurate(const GridSpec& g, double k) {
  const double m = k * g.length / (2.0 * std::numbers::pi);
  return std::abs(m - std::round(m)) <= 1e-9 * std::max(1.0, std::abs(m)) &&
         std::abs(std::round(m)) < static_cast<double>(g.points) / 2.0;
}

/// State of b after a sharp momentum measurement of a with outcome wavenumber
/// k (momentum hbar k): psi_b ~ sum_a exp(-i k x_a) phi(x_a, x_b).
inline WaveField collapse_momentum(const WaveField& phi, double k) {
  require(is_commensurate(phi.grid(), k),
          "collapse_momentum: k must be a multiple of 2 pi / L below Nyquist");
  const double amp = 1.0 / std::sqrt(phi.grid().length);
  return detail::condition_on_a(
      phi, [&](double x) { return std::polar(amp, -k * x); }, "collapse_momentum");
}

/// psi(x, y) = psi_x(x) psi_y(y) on the matching 2D grid.
inline WaveField outer_product_2d(const WaveField& fx, const WaveField& fy) {
  require(fx.rank() == 1 && fy.rank() == 1 && fx.grid() == fy.grid(),
          "outer_product_2d needs two 1D fields on one grid");
  GridSpec g2 = fx.grid();
  g2.dim = 2;
  WaveField out(g2, 1);
  const std::size_t n = g2.points;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = fx[i] * fy[j];
  return out;
}

}  // namespace nlqg
