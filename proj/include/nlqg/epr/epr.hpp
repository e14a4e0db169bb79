#pragma once

#include <cmath>

#include "nlqg/error.hpp"
#include "nlqg/field/wave_field.hpp"

namespace nlqg {

/// Regularized zero-momentum EPR pair on a 1D box:
///   phi(x_a, x_b) ~ exp(-(x_a - x_b)^2 / 4 sigma_c^2) exp(-(x_a + x_b - 2 x0)^2 / 4 sigma_env^2)
/// sigma_c is the position-correlation width, sigma_env the envelope width.
struct EPRSpec {
  double sigma_c = 1.0;
  double sigma_env = 4.0;
  double center = 0.0;
  GridSpec grid{1, 256, 64.0};

  void validate() const {
    grid.validate();
    require(grid.dim == 1, "EPR states live on a 1D box per particle");
    require(sigma_c > 0.0 && sigma_c < sigma_env, "EPR widths need 0 < sigma_c < sigma_env");
    require(sigma_c >= 4.0 * grid.spacing(),
            "epr.sigma_c must resolve at least 4 grid cells (sigma_c >= 4 dx)");
    require(sigma_env <= grid.length / 8.0, "epr.sigma_env must be <= box length / 8");
    require(std::abs(center) <= grid.length / 4.0, "epr.center must stay in the inner half of the box");
  }
};

/// Quadratic-form coefficients of the real EPR amplitude
///   phi = exp(-A (x_a^2 + x_b^2) + 2 C x_a x_b)   (center 0),
/// used by closed-form moment and Schmidt formulas.
struct EPRCoefficients {
  double A;
  double C;
};

inline EPRCoefficients epr_coefficients(const EPRSpec& spec) {
  const double ic = 1.0 / (spec.sigma_c * spec.sigma_c);
  const double ie = 1.0 / (spec.sigma_env * spec.sigma_env);
  return {0.25 * (ic + ie), 0.25 * (ic - ie)};
}

/// Normalized two-particle EPR field.
inline WaveField make_epr(const EPRSpec& spec) {
  spec.validate();
  const double c4 = 4.0 * spec.sigma_c * spec.sigma_c;
  const double e4 = 4.0 * spec.sigma_env * spec.sigma_env;
  WaveField phi = sample_field(spec.grid, 2, [&](double xa, double xb) {
    const double u = xa - xb;
    const double v = xa + xb - 2.0 * spec.center;
    return Complex{std::exp(-u * u / c4 - v * v / e4)};
  });
  phi.normalize();
  return phi;
}

}  // namespace nlqg
