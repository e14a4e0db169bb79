#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nlqg/error.hpp"

namespace nlqg::cosmo {

/// Coupling b(t) between the matter and phantom sectors: either constant
/// or tabulated with linear interpolation (held constant outside the table).
class BModel {
 public:
  static BModel constant(double b0) {
    require(std::isfinite(b0), "b0 must be finite");
    BModel m;
    m.b0_ = b0;
    return m;
  }

  static BModel tabulated(std::vector<double> t, std::vector<double> b) {
    require(t.size() == b.size() && !t.empty(), "b table needs matching, non-empty t and b columns");
    for (std::size_t i = 1; i < t.size(); ++i)
      require(t[i] > t[i - 1], "b table times must be strictly increasing");
    for (std::size_t i = 0; i < t.size(); ++i)
      require(std::isfinite(t[i]) && std::isfinite(b[i]), "b table entries must be finite");
    BModel m;
    m.t_ = std::move(t);
    m.b_ = std::move(b);
    return m;
  }

  bool is_constant() const { return t_.empty(); }
  double b0() const { return b0_; }
  const std::vector<double>& times() const { return t_; }
  const std::vector<double>& values() const { return b_; }

  double operator()(double t) const {
    if (t_.empty()) return b0_;
    if (t <= t_.front()) return b_.front();
    if (t >= t_.back()) return b_.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin());
    const std::size_t lo = hi - 1;
    const double f = (t - t_[lo]) / (t_[hi] - t_[lo]);
    return b_[lo] + f * (b_[hi] - b_[lo]);
  }

 private:
  double b0_ = 0.0;
  std::vector<double> t_, b_;
};

/// Flat FRW universe with dust and a phantom fluid p = w rho.
struct CosmoParams {
  /// Gravitational coupling kappa0 (= 8 pi G); H^2 = kappa0^2/3 rho. The
  /// default kappa0^2 = 3 gives H^2 = rho.
  double kappa0 = std::sqrt(3.0);
  double w = -1.2;
  BModel b = BModel::constant(0.0);

  double gamma() const { return w + 1.0; }

  void validate() const {
    require(std::isfinite(kappa0) && kappa0 > 0.0, "cosmo.kappa0 must be > 0");
    require(std::isfinite(w), "cosmo.w must be finite");
  }
};

struct CosmoState {
  double t = 0.0;
  double a = 1.0;
  double rho_m = 0.3;
  double rho_ph = 0.7;

  void validate() const {
    require(std::isfinite(t), "cosmo state time must be finite");
    require(std::isfinite(a) && a > 0.0, "scale factor must be > 0");
    require(rho_m >= 0.0 && rho_ph >= 0.0, "densities must be >= 0");
  }
};

/// Expanding branch of the Friedmann equation, H = +sqrt(kappa0^2/3 (rho_m + rho_ph)).
inline double hubble(const CosmoState& s, const CosmoParams& p) {
  const double rho = s.rho_m + s.rho_ph;
  require(rho >= 0.0, "hubble: total density is negative");
  return std::sqrt(p.kappa0 * p.kappa0 / 3.0 * rho);
}

struct CosmoRates {
  double da;
  double drho_m;
  double drho_ph;
};

/// da/dt = aH, drho_m/dt = -(3H + b) rho_m, drho_ph/dt = -3 gamma H rho_ph + b rho_m.
inline CosmoRates cosmo_rhs(const CosmoState& s, const CosmoParams& p) {
  const double H = hubble(s, p);
  const double b = p.b(s.t);
  return {s.a * H, -(3.0 * H + b) * s.rho_m, -3.0 * p.gamma() * H * s.rho_ph + b * s.rho_m};
}

struct EnergyConditionReport {
  bool weak = false;
  bool dominant = false;
  double rho = 0.0;
  double p = 0.0;
};

/// Perfect-fluid energy conditions: weak <=> rho >= 0 and rho + p >= 0;
/// dominant <=> rho >= |p|. Comparisons are inclusive.
inline EnergyConditionReport energy_conditions(double rho, double p) {
  return {rho >= 0.0 && rho + p >= 0.0, rho >= std::abs(p), rho, p};
}

}  // namespace nlqg::cosmo
