#pragma once

#include <cmath>
#include <vector>

#include "nlqg/dg/evolve.hpp"
#include "nlqg/dg/params.hpp"
#include "nlqg/dg/rhs.hpp"
#include "nlqg/dg/stepper.hpp"
#include "nlqg/field/density_matrix.hpp"
#include "nlqg/table.hpp"

namespace nlqg {

struct PairEvolution {
  WaveField final_field;
  Trajectory diagnostics;  // t, norm
  std::vector<double> sample_times;
  std::vector<DensityMatrix> rho_b;
};

/// Integrates i dPhi/dt = (F_a + F_b) Phi with RK4, recording the norm and
/// the reduced state of particle b every `sample_every` steps.
inline PairEvolution evolve_pair(const WaveField& phi0, const PairParams& pp, double t_final,
                                 double dt, std::size_t sample_every = 1) {
  require(phi0.particle_count() == 2, "evolve_pair: expects a two-particle field");
  require(std::isfinite(t_final) && t_final >= 0.0, "evolve_pair: t_final must be >= 0");
  require(std::isfinite(dt) && dt > 0.0, "evolve_pair: dt must be > 0");
  require(sample_every >= 1, "evolve_pair: sample_every must be >= 1");
  pp.validate();
  detail::check_finite(phi0);
  require(phi0.norm_squared() > 0.0, "evolve_pair: initial field has zero norm");

  PairEvolution out{phi0, Trajectory({"t", "norm"}), {}, {}};
  auto record = [&](double t) {
    out.diagnostics.append({t, out.final_field.norm_squared()});
    out.sample_times.push_back(t);
    out.rho_b.push_back(detail::reduced_b(out.final_field));
  };
  record(0.0);

  auto rhs = [&](const WaveField& f) { return detail::pair_rhs_unchecked(f, pp); };
  const std::size_t steps = detail::step_count(t_final, dt);
  double t = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double h = detail::step_size(s, steps, t_final, dt);
    out.final_field = detail::checked_step(out.final_field, h, rhs, s + 1);
    t = s + 1 == steps ? t_final : t + h;
    if ((s + 1) % sample_every == 0 || s + 1 == steps) record(t);
  }
  return out;
}

/// |<a, b>|^2 / (||a||^2 ||b||^2)
inline double fidelity(const WaveField& a, const WaveField& b) {
  return std::norm(inner_product(a, b)) / (a.norm_squared() * b.norm_squared());
}

}  // namespace nlqg
