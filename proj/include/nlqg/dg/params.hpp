#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nlqg/error.hpp"
#include "nlqg/field/grid.hpp"

namespace nlqg {

/// Coefficients of the real, degree-zero functional R = sum_j c_j R_j with
///   R1 = div j / rho,     R2 = lap rho / rho,   R3 = j^2 / rho^2,
///   R4 = j . grad rho / rho^2,                  R5 = (grad rho)^2 / rho^2.
/// Each c_j carries whatever units make c_j R_j an energy.
struct RSpec {
  std::array<double, 5> c{};

  bool is_zero() const {
    for (double v : c)
      if (v != 0.0) return false;
    return true;
  }

  friend bool operator==(const RSpec&, const RSpec&) = default;
};

/// Optional real external potential V(x), summed over the axes of a particle.
///   harmonic: V = m omega^2 (x - center)^2 / 2, strength = omega
///   cosine:   V = strength * cos(2 pi (x - center) / L)
///   linear:   V = strength * (x - center)
struct Potential {
  enum class Kind { none, harmonic, cosine, linear };

  Kind kind = Kind::none;
  double strength = 0.0;
  double center = 0.0;

  double at(double x, double mass, double box) const {
    switch (kind) {
      case Kind::none: return 0.0;
      case Kind::harmonic: return 0.5 * mass * strength * strength * (x - center) * (x - center);
      case Kind::cosine: return strength * std::cos(2.0 * std::numbers::pi * (x - center) / box);
      case Kind::linear: return strength * (x - center);
    }
    return 0.0;
  }

  bool is_none() const { return kind == Kind::none || strength == 0.0; }

  friend bool operator==(const Potential&, const Potential&) = default;
};

/// Physical constants of one species in the Doebner-Goldin equation.
struct DGParams {
  double hbar = 1.0;
  double mass = 1.0;
  double D = 0.0;
  RSpec r{};
  Potential potential{};
  /// Relative regularization floor: |psi|^2 -> |psi|^2 + floor * mean(|psi|^2).
  double floor = 1e-12;
  /// Backward diffusion (D < 0) is ill-posed; it must be requested explicitly.
  bool allow_negative_D = false;

  void validate() const {
    require(std::isfinite(hbar) && hbar > 0.0, "dg.hbar must be > 0");
    require(std::isfinite(mass) && mass > 0.0, "dg.mass must be > 0");
    require(std::isfinite(D), "dg.D must be finite");
    require(D >= 0.0 || allow_negative_D, "dg.D < 0 requires dg.allow_negative_D = true");
    require(std::isfinite(floor) && floor > 0.0, "dg.floor must be > 0");
    for (double v : r.c) require(std::isfinite(v), "R coefficients must be finite");
  }

  bool is_linear() const { return D == 0.0 && r.is_zero(); }

  friend bool operator==(const DGParams&, const DGParams&) = default;
};

/// Two distinguishable particles with no interaction term (K = 0): the
/// evolution is separating by construction.
struct PairParams {
  DGParams a{};
  DGParams b{};

  void validate() const {
    a.validate();
    b.validate();
    require(a.floor == b.floor, "both species must share one regularization floor");
  }
};

}  // namespace nlqg
