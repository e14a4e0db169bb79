#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "nlqg/dg/params.hpp"
#include "nlqg/dg/rhs.hpp"
#include "nlqg/dg/stepper.hpp"
#include "nlqg/field/observable.hpp"
#include "nlqg/field/spectral.hpp"
#include "nlqg/table.hpp"

namespace nlqg {

struct NamedObservable {
  std::string name;
  Observable op;
};

struct EvolveResult {
  Trajectory diagnostics;  // t, norm, mean_x, var_x, <observables...>
  WaveField final_field;
};

namespace detail {

/// Splits [0, t_final] into steps of dt; the last step is shortened so the
/// run lands exactly on t_final.
inline std::size_t step_count(double t_final, double dt) {
  if (t_final == 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(t_final / dt * (1.0 - 1e-12)));
}

inline double step_size(std::size_t step, std::size_t count, double t_final, double dt) {
  return step + 1 == count ? t_final - static_cast<double>(count - 1) * dt : dt;
}

/// Norm and first two moments of x along axis 0 (normalized by the norm).
inline std::vector<double> field_moments(const WaveField& psi) {
  const GridSpec& g = psi.grid();
  const std::size_t n = g.points;
  double total = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t idx = 0; idx < psi.size(); ++idx) {
    const double w = std::norm(psi[idx]);
    const double x = g.coordinate(axis_index(idx, n, psi.rank(), 0));
    total += w;
    m1 += w * x;
    m2 += w * x * x;
  }
  const double mean = m1 / total;
  const double var = m2 / total - mean * mean;
  return {total * psi.cell_volume(), mean, var};
}

inline std::vector<double> diagnostics_row(double t, const WaveField& psi,
                                           std::span<const NamedObservable> obs) {
  std::vector<double> row{t};
  const auto m = field_moments(psi);
  row.insert(row.end(), m.begin(), m.end());
  for (const auto& o : obs) row.push_back(inner_product(psi, apply(o.op, psi)).real() / m[0]);
  return row;
}

}  // namespace detail

/// Integrates the DG equation with fixed-step RK4 from 0 to t_final and
/// samples diagnostics every `sample_every` steps (and at the final step).
inline EvolveResult evolve(const WaveField& psi0, const DGParams& p, double t_final, double dt,
                           std::size_t sample_every, std::span<const NamedObservable> obs = {}) {
  require(psi0.particle_count() == 1, "evolve: expects a one-particle field");
  require(std::isfinite(t_final) && t_final >= 0.0, "evolve: t_final must be >= 0");
  require(std::isfinite(dt) && dt > 0.0, "evolve: dt must be > 0");
  require(sample_every >= 1, "evolve: sample_every must be >= 1");
  p.validate();
  detail::check_finite(psi0);
  require(psi0.norm_squared() > 0.0, "evolve: initial field has zero norm");
  for (const auto& o : obs) o.op.validate_for(psi0);

  std::vector<std::string> cols{"t", "norm", "mean_x", "var_x"};
  for (const auto& o : obs) cols.push_back(o.name);
  EvolveResult result{Trajectory(cols), psi0};
  result.diagnostics.append(detail::diagnostics_row(0.0, psi0, obs));

  auto rhs = [&](const WaveField& f) { return detail::dg_rhs_unchecked(f, p); };
  const std::size_t steps = detail::step_count(t_final, dt);
  double t = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double h = detail::step_size(s, steps, t_final, dt);
    result.final_field = detail::checked_step(result.final_field, h, rhs, s + 1);
    t = s + 1 == steps ? t_final : t + h;
    if ((s + 1) % sample_every == 0 || s + 1 == steps)
      result.diagnostics.append(detail::diagnostics_row(t, result.final_field, obs));
  }
  return result;
}

}  // namespace nlqg
