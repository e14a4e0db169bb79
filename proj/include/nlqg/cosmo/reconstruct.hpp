#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "nlqg/cosmo/model.hpp"
#include "nlqg/error.hpp"
#include "nlqg/table.hpp"

namespace nlqg::cosmo {

/// Smallest matter fraction reconstruct_b accepts.
inline constexpr double kMinOmegaM = 1e-6;

/// Derivative of y(t) on a (possibly non-uniform) grid: three-point centered
/// differences inside, second-order one-sided formulas at both ends.
inline std::vector<double> derivative(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  require(n == y.size() && n >= 3, "derivative: need at least three samples");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = t[i] - t[i - 1];
    const double h1 = t[i + 1] - t[i];
    d[i] = -h1 / (h0 * (h0 + h1)) * y[i - 1] + (h1 - h0) / (h0 * h1) * y[i] +
           h0 / (h1 * (h0 + h1)) * y[i + 1];
  }
  {
    const double h0 = t[1] - t[0];
    const double h1 = t[2] - t[1];
    d[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * y[0] + (h0 + h1) / (h0 * h1) * y[1] -
           h0 / (h1 * (h0 + h1)) * y[2];
  }
  {
    const double h0 = t[n - 2] - t[n - 3];
    const double h1 = t[n - 1] - t[n - 2];
    d[n - 1] = h1 / (h0 * (h0 + h1)) * y[n - 3] - (h0 + h1) / (h0 * h1) * y[n - 2] +
               (2.0 * h1 + h0) / (h1 * (h0 + h1)) * y[n - 1];
  }
  return d;
}

/// b(t) = 3 w H (1 - Omega_m) - dOmega_m/dt / Omega_m from sampled t, H and
/// Omega_m columns, with the derivative taken from the samples alone.
inline Trajectory reconstruct_b(const Trajectory& traj, const CosmoParams& params) {
  params.validate();
  const std::vector<double> t = traj.column("t");
  const std::vector<double> H = traj.column("H");
  const std::vector<double> om = traj.column("omega_m");
  require(t.size() >= 5, "reconstruct_b: trajectory needs at least 5 samples");
  for (std::size_t i = 1; i < t.size(); ++i)
    require(t[i] > t[i - 1], "reconstruct_b: sample times must be strictly increasing");
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!(om[i] >= kMinOmegaM))
      throw ValidationError("reconstruct_b: Omega_m = " + format_number(om[i]) + " at t = " +
                            format_number(t[i]) + " is below the 1e-6 threshold");

  const std::vector<double> dom = derivative(t, om);
  Trajectory out{{"t", "b"}};
  for (std::size_t i = 0; i < t.size(); ++i)
    out.append({t[i], 3.0 * params.w * H[i] * (1.0 - om[i]) - dom[i] / om[i]});
  return out;
}

struct SignInterval {
  double t_start;
  double t_end;
  int sign;  // -1, 0 or +1
};

/// Maximal runs of samples sharing a sign, with |b| <= eta counted as zero.
/// Each interval spans its first to its last sample.
inline std::vector<SignInterval> b_sign_intervals(std::span<const double> t,
                                                  std::span<const double> b, double eta = 1e-8) {
  require(!t.empty() && t.size() == b.size(), "b_sign_intervals: need a non-empty t, b table");
  require(eta >= 0.0, "b_sign_intervals: dead band must be >= 0");
  auto sign_of = [eta](double v) { return std::abs(v) <= eta ? 0 : (v > 0.0 ? 1 : -1); };
  std::vector<SignInterval> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const int s = sign_of(b[i]);
    if (!out.empty() && out.back().sign == s)
      out.back().t_end = t[i];
    else
      out.push_back({t[i], t[i], s});
  }
  return out;
}

inline std::vector<SignInterval> b_sign_intervals(const Trajectory& table, double eta = 1e-8) {
  const auto t = table.column("t");
  const auto b = table.column("b");
  return b_sign_intervals(t, b, eta);
}

}  // namespace nlqg::cosmo
