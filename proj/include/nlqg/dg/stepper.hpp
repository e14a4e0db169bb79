#pragma once

#include <cmath>
#include <cstddef>

#include "nlqg/dg/params.hpp"
#include "nlqg/dg/rhs.hpp"
#include "nlqg/error.hpp"
#include "nlqg/field/wave_field.hpp"

namespace nlqg {

/// Classical fourth-order Runge-Kutta step for an autonomous field equation.
/// No renormalization: norm drift stays visible as a diagnostic.
template <class Rhs>
WaveField rk4_step(const WaveField& psi, double dt, Rhs&& rhs) {
  const WaveField k1 = rhs(psi);
  WaveField stage = psi;
  stage.add_scaled(0.5 * dt, k1);
  const WaveField k2 = rhs(stage);
  stage = psi;
  stage.add_scaled(0.5 * dt, k2);
  const WaveField k3 = rhs(stage);
  stage = psi;
  stage.add_scaled(dt, k3);
  const WaveField k4 = rhs(stage);

  WaveField out = psi;
  out.add_scaled(dt / 6.0, k1);
  out.add_scaled(dt / 3.0, k2);
  out.add_scaled(dt / 3.0, k3);
  out.add_scaled(dt / 6.0, k4);
  return out;
}

/// Relative norm change above which a single step counts as unstable.
inline constexpr double kInstabilityNormJump = 0.10;

namespace detail {

template <class Rhs>
WaveField checked_step(const WaveField& psi, double dt, Rhs&& rhs, std::size_t step_index) {
  const double before = psi.norm_squared();
  WaveField out = rk4_step(psi, dt, rhs);
  if (!out.all_finite()) throw NumericalInstability("non-finite field after RK4 step", step_index);
  const double after = out.norm_squared();
  if (std::abs(after - before) > kInstabilityNormJump * before)
    throw NumericalInstability("norm changed by more than 10% in one step", step_index);
  return out;
}

}  // namespace detail

/// One RK4 step of the one-particle DG equation.
inline WaveField step_rk4(const WaveField& psi, const DGParams& p, double dt) {
  require(psi.particle_count() == 1, "step_rk4: expects a one-particle field");
  require(std::isfinite(dt) && dt > 0.0, "step_rk4: dt must be > 0");
  p.validate();
  detail::check_finite(psi);
  return detail::checked_step(
      psi, dt, [&](const WaveField& f) { return detail::dg_rhs_unchecked(f, p); }, 0);
}

/// Safety factor of the explicit step heuristic.
inline constexpr double kDtSafety = 0.1;

/// dt = 0.1 / (hbar |k|^2_max / 2m + |D| |k|^2_max), with |k|^2_max = dim (pi/dx)^2.
inline double suggest_dt(const GridSpec& grid, const DGParams& p) {
  grid.validate();
  p.validate();
  const double k2 = grid.dim * grid.k_max() * grid.k_max();
  return kDtSafety / (p.hbar * k2 / (2.0 * p.mass) + std::abs(p.D) * k2);
}

/// Bound for the separating pair evolution: the two species' rates add.
inline double suggest_dt(const GridSpec& grid, const PairParams& pp) {
  grid.validate();
  pp.validate();
  const double k2 = grid.k_max() * grid.k_max();
  const double rate = (pp.a.hbar / (2.0 * pp.a.mass) + std::abs(pp.a.D)) * k2 +
                      (pp.b.hbar / (2.0 * pp.b.mass) + std::abs(pp.b.D)) * k2;
  return kDtSafety / rate;
}

}  // namespace nlqg
