#pragma once

#include <algorithm>
#include <cmath>

#include "nlqg/dg/params.hpp"
#include "nlqg/field/flow.hpp"
#include "nlqg/field/spectral.hpp"

namespace nlqg {

/// Max-norm residual of the diffusion-modified continuity equation
///   d rho/dt + div j - D lap rho = 0
/// with the time derivative taken as (rho_after - rho_before)/dt and the
/// spatial terms evaluated on the midpoint field (psi_before + psi_after)/2.
/// Passing include_diffusion = false drops the D lap rho term.
inline double continuity_residual(const WaveField& before, const WaveField& after, double dt,
                                  const DGParams& p, bool include_diffusion = true) {
  require(before.particle_count() == 1, "continuity_residual: expects one-particle fields");
  before.check_shape(after);
  require(std::isfinite(dt) && dt > 0.0, "continuity_residual: dt must be > 0");

  WaveField mid = before;
  mid += after;
  mid *= Complex{0.5};

  const Flow flow = density_and_current(mid, p);
  WaveField rho_mid(mid.grid(), 1);
  for (std::size_t i = 0; i < mid.size(); ++i) rho_mid[i] = flow.density[i];

  std::vector<double> div_j(mid.size(), 0.0);
  for (int axis = 0; axis < mid.rank(); ++axis) {
    WaveField j(mid.grid(), 1);
    for (std::size_t i = 0; i < mid.size(); ++i)
      j[i] = flow.current[static_cast<std::size_t>(axis)][i];
    const WaveField dj = gradient(j, axis);
    for (std::size_t i = 0; i < mid.size(); ++i) div_j[i] += dj[i].real();
  }
  const WaveField lap_rho = laplacian(rho_mid);

  double worst = 0.0;
  for (std::size_t i = 0; i < mid.size(); ++i) {
    double r = (std::norm(after[i]) - std::norm(before[i])) / dt + div_j[i];
    if (include_diffusion) r -= p.D * lap_rho[i].real();
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace nlqg
