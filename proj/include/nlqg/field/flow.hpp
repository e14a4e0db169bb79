#pragma once

#include <vector>

#include "nlqg/dg/params.hpp"
#include "nlqg/field/spectral.hpp"
#include "nlqg/field/wave_field.hpp"

namespace nlqg {

/// rho = |psi|^2 and j_axis = (hbar/m) Im(conj(psi) d_axis psi).
struct Flow {
  std::vector<double> density;
  std::vector<std::vector<double>> current;  // one array per axis
};

inline Flow density_and_current(const WaveField& field, const DGParams& params) {
  require(field.particle_count() == 1, "density_and_current: expects a one-particle field");
  detail::check_finite(field);
  params.validate();

  Flow out;
  out.density.resize(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) out.density[i] = std::norm(field[i]);

  const double scale = params.hbar / params.mass;
  for (int axis = 0; axis < field.rank(); ++axis) {
    const WaveField d = gradient(field, axis);
    std::vector<double> j(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) j[i] = scale * (std::conj(field[i]) * d[i]).imag();
    out.current.push_back(std::move(j));
  }
  return out;
}

}  // namespace nlqg
