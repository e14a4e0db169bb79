#pragma once

#include <span>
#include <vector>

#include "nlqg/dg/params.hpp"
#include "nlqg/error.hpp"
#include "nlqg/field/spectral.hpp"
#include "nlqg/field/wave_field.hpp"

namespace nlqg {

namespace detail {

/// rho + floor * mean(rho), the regularized density used in every ratio.
inline std::vector<double> regularized_density(const WaveField& psi, double floor) {
  std::vector<double> rho(psi.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    rho[i] = std::norm(psi[i]);
    mean += rho[i];
  }
  mean /= static_cast<double>(psi.size());
  const double eps = floor * mean;
  for (double& r : rho) r += eps;
  return rho;
}

/// V of one species tabulated on every node of `psi`. For a two-particle
/// field the species owns a single axis and V depends on that coordinate.
inline std::vector<double> species_potential(const WaveField& psi, std::span<const int> axes,
                                             const DGParams& p) {
  std::vector<double> v(psi.size(), 0.0);
  if (p.potential.is_none()) return v;
  const GridSpec& g = psi.grid();
  const std::size_t n = g.points;
  for (std::size_t idx = 0; idx < psi.size(); ++idx)
    for (int axis : axes)
      v[idx] += p.potential.at(g.coordinate(axis_index(idx, n, psi.rank(), axis)), p.mass,
                               g.length);
  return v;
}

/// Adds one species' contribution to d psi / dt:
///   (i hbar / 2m) lap psi + D (lap psi + |grad psi|^2 / rho_eps psi) - (i/hbar)(R + V) psi
/// where the derivatives run over the species' own axes.
inline void add_species_rhs(const WaveField& psi, std::span<const int> axes,
                            std::span<const AxisDerivatives> derivs, const DGParams& p,
                            std::span<const double> rho_eps, WaveField& out) {
  const Complex kinetic{0.0, p.hbar / (2.0 * p.mass)};
  const Complex minus_i_over_hbar{0.0, -1.0 / p.hbar};
  const double flux_scale = p.hbar / p.mass;
  const bool with_r = !p.r.is_zero();
  const bool with_d = p.D != 0.0;
  const std::vector<double> potential = species_potential(psi, axes, p);

  for (std::size_t i = 0; i < psi.size(); ++i) {
    const Complex z = psi[i];
    Complex lap{};
    double grad2 = 0.0;
    for (const auto& d : derivs) {
      lap += d.second[i];
      grad2 += std::norm(d.first[i]);
    }
    Complex dz = kinetic * lap;
    if (with_d) dz += p.D * (lap + (grad2 / rho_eps[i]) * z);

    double real_potential = potential[i];
    if (with_r) {
      const double re = rho_eps[i];
      double div_j = 0.0, lap_rho = 0.0, j2 = 0.0, j_dot_grad = 0.0, grad_rho2 = 0.0;
      for (const auto& d : derivs) {
        const Complex zf = std::conj(z) * d.first[i];
        const Complex zs = std::conj(z) * d.second[i];
        const double j = flux_scale * zf.imag();
        const double grad_rho = 2.0 * zf.real();
        div_j += flux_scale * zs.imag();
        lap_rho += 2.0 * zs.real() + 2.0 * std::norm(d.first[i]);
        j2 += j * j;
        j_dot_grad += j * grad_rho;
        grad_rho2 += grad_rho * grad_rho;
      }
      const auto& c = p.r.c;
      real_potential += c[0] * div_j / re + c[1] * lap_rho / re + c[2] * j2 / (re * re) +
                        c[3] * j_dot_grad / (re * re) + c[4] * grad_rho2 / (re * re);
    }
    if (real_potential != 0.0) dz += minus_i_over_hbar * real_potential * z;
    out[i] += dz;
  }
}

inline WaveField dg_rhs_unchecked(const WaveField& psi, const DGParams& p) {
  std::vector<int> axes(static_cast<std::size_t>(psi.rank()));
  std::vector<AxisDerivatives> derivs;
  for (int a = 0; a < psi.rank(); ++a) {
    axes[static_cast<std::size_t>(a)] = a;
    derivs.push_back(axis_derivatives(psi, a));
  }
  const auto rho_eps = regularized_density(psi, p.floor);
  WaveField out(psi.grid(), psi.particle_count());
  add_species_rhs(psi, axes, derivs, p, rho_eps, out);
  return out;
}

inline WaveField pair_rhs_unchecked(const WaveField& phi, const PairParams& pp) {
  const int axis_a[] = {0};
  const int axis_b[] = {1};
  const AxisDerivatives da[] = {axis_derivatives(phi, 0)};
  const AxisDerivatives db[] = {axis_derivatives(phi, 1)};
  const auto rho_eps = regularized_density(phi, pp.a.floor);
  WaveField out(phi.grid(), 2);
  add_species_rhs(phi, axis_a, da, pp.a, rho_eps, out);
  add_species_rhs(phi, axis_b, db, pp.b, rho_eps, out);
  return out;
}

}  // namespace detail

/// Time derivative of a one-particle field under the Doebner-Goldin equation
///   i hbar dpsi/dt = -(hbar^2/2m) lap psi + i D hbar (lap psi + |grad psi|^2/|psi|^2 psi)
///                    + R(psi) psi + V psi.
inline WaveField dg_rhs(const WaveField& psi, const DGParams& p) {
  require(psi.particle_count() == 1, "dg_rhs: expects a one-particle field");
  p.validate();
  detail::check_finite(psi);
  WaveField out = detail::dg_rhs_unchecked(psi, p);
  if (!out.all_finite())
    throw NumericalInstability("non-finite DG right-hand side (under-resolved field or floor too small)", 0);
  return out;
}

/// Separating two-particle generator F_a + F_b: each species differentiates
/// only its own coordinate, and both see the shared modulus |Phi|.
inline WaveField pair_rhs(const WaveField& phi, const PairParams& pp) {
  require(phi.particle_count() == 2, "pair_rhs: expects a two-particle field");
  pp.validate();
  detail::check_finite(phi);
  WaveField out = detail::pair_rhs_unchecked(phi, pp);
  if (!out.all_finite()) throw NumericalInstability("non-finite pair right-hand side", 0);
  return out;
}

}  // namespace nlqg
