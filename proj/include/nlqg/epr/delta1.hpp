#pragma once

#include <cmath>
#include <cstddef>
#include <future>
#include <span>
#include <vector>

#include "nlqg/dg/params.hpp"
#include "nlqg/dg/rhs.hpp"
#include "nlqg/epr/collapse.hpp"
#include "nlqg/field/density_matrix.hpp"
#include "nlqg/field/observable.hpp"

namespace nlqg {

/// d/dt <psi(t), B psi(t)> at t = 0 under the DG equation, evaluated as
/// 2 Re <dpsi/dt, B psi> for self-adjoint B.
inline double first_order_rate(const WaveField& psi, const Observable& B, const DGParams& p) {
  require(psi.particle_count() == 1, "first_order_rate: expects a one-particle field");
  detail::require_normalized(psi, "first_order_rate");
  B.validate_for(psi);
  const WaveField dpsi = dg_rhs(psi, p);
  return 2.0 * inner_product(dpsi, apply(B, psi)).real();
}

/// Both collapsed b-states for one (q, p, s) cell; n = 2 uses the product
/// EPR pair phi(x_a, x_b) phi(y_a, y_b) with the same outcome along each axis,
/// which makes every collapse an outer product of 1D collapses.
struct CollapsedPair {
  WaveField after_position;
  WaveField after_momentum;
};

inline CollapsedPair collapse_both(const WaveField& phi, double q, double k, double s, int n) {
  require(n == 1 || n == 2, "Delta_1 supports spatial dimension 1 or 2");
  WaveField pos = collapse_position(phi, q, s);
  WaveField mom = collapse_momentum(phi, k);
  if (n == 1) return {std::move(pos), std::move(mom)};
  return {outer_product_2d(pos, pos), outer_product_2d(mom, mom)};
}

/// Delta_1(B|p,q): first-order rate of <B> on b after a position collapse of
/// a, minus the same rate after a momentum collapse of a.
inline double delta1(const WaveField& phi, double q, double k, double s, const Observable& B,
                     const DGParams& params_b, int n = 1) {
  const CollapsedPair c = collapse_both(phi, q, k, s, n);
  return first_order_rate(c.after_position, B, params_b) -
         first_order_rate(c.after_momentum, B, params_b);
}

/// Expectation of I (x) B in the EPR state. For n = 2, B(x, y) is averaged
/// over the product of the 1D b-marginals.
inline double epr_expectation_b(const WaveField& phi, const Observable& B, int n = 1) {
  require(B.kind == Observable::Kind::position, "epr_expectation_b supports position multipliers");
  const DensityMatrix rho = partial_trace_b(phi);
  const Eigen::VectorXd pop = rho.populations();
  const std::size_t m = rho.size();
  double acc = 0.0;
  if (n == 1) {
    for (std::size_t i = 0; i < m; ++i) acc += pop[static_cast<Eigen::Index>(i)] * B.samples[i];
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        acc += pop[static_cast<Eigen::Index>(i)] * pop[static_cast<Eigen::Index>(j)] *
               B.samples[i * m + j];
  }
  return acc;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. r2 is 1 for data with
/// no spread in y.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, "fit_line: degenerate abscissae (all s equal)");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += r * r;
  }
  const double scale = std::max(std::abs(my), 1.0);
  f.r2 = syy <= 1e-30 * scale * scale ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return f;
}

struct Delta1Result {
  std::vector<double> s_values;
  std::vector<double> delta1_values;
  double fitted_slope = 0.0;
  double fit_intercept = 0.0;
  double fit_r2 = 0.0;
  double predicted_slope = 0.0;  // 4 n D_b <I (x) B>_phi
  double expectation_b = 0.0;
};

/// Delta_1 over an ascending list of sharpness values, with a straight-line
/// fit over the upper half of the list. Cells are independent; `parallel`
/// evaluates them concurrently with identical results.
inline Delta1Result delta1_sweep(const WaveField& phi, double q, double k,
                                 std::span<const double> s_list, const Observable& B,
                                 const DGParams& params_b, int n = 1, bool parallel = false) {
  require(s_list.size() >= 4, "delta1_sweep: need at least 4 sharpness values");
  for (std::size_t i = 1; i < s_list.size(); ++i)
    require(s_list[i] >= s_list[i - 1], "delta1_sweep: s values must be ascending");
  params_b.validate();

  Delta1Result res;
  res.s_values.assign(s_list.begin(), s_list.end());
  res.delta1_values.resize(s_list.size());
  if (parallel) {
    std::vector<std::future<double>> jobs;
    for (double s : s_list)
      jobs.push_back(std::async(std::launch::async,
                                [&, s] { return delta1(phi, q, k, s, B, params_b, n); }));
    for (std::size_t i = 0; i < jobs.size(); ++i) res.delta1_values[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < s_list.size(); ++i)
      res.delta1_values[i] = delta1(phi, q, k, s_list[i], B, params_b, n);
  }

  const std::size_t lo = s_list.size() / 2;
  const auto fit = fit_line(std::span(res.s_values).subspan(lo),
                            std::span<const double>(res.delta1_values).subspan(lo));
  res.fitted_slope = fit.slope;
  res.fit_intercept = fit.intercept;
  res.fit_r2 = fit.r2;
  res.expectation_b = epr_expectation_b(phi, B, n);
  res.predicted_slope = 4.0 * n * params_b.D * res.expectation_b;
  return res;
}

/// Rough size of the nonlinear effect relative to the linear one:
/// D / (hbar / 2m) * s * L^2.
inline double ratio_estimate(double D, double mass, double hbar, double s, double L) {
  require(D > 0.0 && mass > 0.0 && hbar > 0.0 && s > 0.0 && L > 0.0,
          "ratio_estimate: all inputs must be positive");
  return D / (hbar / (2.0 * mass)) * s * L * L;
}

}  // namespace nlqg
