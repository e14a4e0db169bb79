#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "nlqg/cosmo/model.hpp"
#include "nlqg/error.hpp"
#include "nlqg/table.hpp"

namespace nlqg::cosmo {

enum class Termination { t_final_reached, big_rip, unphysical };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::t_final_reached: return "t_final_reached";
    case Termination::big_rip: return "big_rip";
    case Termination::unphysical: return "unphysical";
  }
  return "unknown";
}

struct IntegrateOptions {
  double t_final = 1.0;
  double sample_interval = 0.01;
  double rtol = 1e-10;
  double atol = 1e-12;
  double a_max = 1e6;

  void validate(double t0) const {
    require(std::isfinite(t_final) && t_final >= t0, "cosmo.t_final must be >= the initial time");
    require(sample_interval > 0.0, "cosmo.sample_interval must be > 0");
    require(rtol > 0.0 && atol > 0.0, "cosmo tolerances must be > 0");
    require(a_max > 0.0, "cosmo.a_max must be > 0");
  }
};

struct CosmoRun {
  Trajectory trajectory{{"t", "a", "H", "rho_m", "rho_ph", "omega_m"}};
  Termination reason = Termination::t_final_reached;
  double t_end = 0.0;
  std::size_t steps = 0;
};

namespace detail {

using OdeState = std::array<double, 3>;  // a, rho_m, rho_ph

inline std::vector<double> sample_row(double t, const OdeState& x, const CosmoParams& p) {
  const CosmoState s{t, x[0], x[1], x[2]};
  const double rho = x[1] + x[2];
  const double H = rho >= 0.0 ? hubble(s, p) : std::nan("");
  return {t, x[0], H, x[1], x[2], rho > 0.0 ? x[1] / rho : std::nan("")};
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration with dense output, sampled on
/// t0 + i * sample_interval. Stops early with `big_rip` once a > a_max and
/// with `unphysical` if a density turns negative; the state at the stopping
/// step is appended as the last row.
inline CosmoRun integrate(const CosmoState& initial, const CosmoParams& params,
                          const IntegrateOptions& opt) {
  namespace odeint = boost::numeric::odeint;
  initial.validate();
  params.validate();
  opt.validate(initial.t);

  auto system = [&](const detail::OdeState& x, detail::OdeState& dxdt, double t) {
    // a rejected trial step may probe slightly negative densities
    const CosmoState s{t, x[0], std::max(x[1], 0.0), std::max(x[2], 0.0)};
    const double H = hubble(s, params);
    const double b = params.b(t);
    dxdt = {x[0] * H, -(3.0 * H + b) * x[1], -3.0 * params.gamma() * H * x[2] + b * x[1]};
  };

  CosmoRun run;
  const double t0 = initial.t;
  const detail::OdeState x0{initial.a, initial.rho_m, initial.rho_ph};
  run.trajectory.append(detail::sample_row(t0, x0, params));
  run.t_end = t0;
  if (opt.t_final == t0) return run;

  auto stepper = odeint::make_dense_output(opt.atol, opt.rtol,
                                           odeint::runge_kutta_dopri5<detail::OdeState>());
  stepper.initialize(x0, t0, std::min(opt.sample_interval, opt.t_final - t0) * 1e-3);

  const double t_stop = opt.t_final;
  const double slack = 1e-12 * std::max(1.0, std::abs(t_stop));
  std::size_t next = 1;
  auto sample_time = [&](std::size_t i) {
    return t0 + static_cast<double>(i) * opt.sample_interval;
  };
  constexpr std::size_t kMaxSteps = 50'000'000;

  while (true) {
    std::pair<double, double> interval;
    try {
      interval = stepper.do_step(system);
    } catch (const odeint::step_adjustment_error&) {
      throw NumericalInstability("cosmological step size underflow (stiffness)", run.steps);
    }
    ++run.steps;
    const auto [t_prev, t_cur] = interval;
    if (t_cur - t_prev <= 1e-15 * std::max(1.0, std::abs(t_cur)))
      throw NumericalInstability("cosmological step size underflow (stiffness)", run.steps);
    if (run.steps > kMaxSteps)
      throw NumericalInstability("cosmological step budget exhausted", run.steps);

    const detail::OdeState xc = stepper.current_state();
    std::optional<Termination> early;
    if (!(xc[1] >= 0.0 && xc[2] >= 0.0)) early = Termination::unphysical;
    else if (!(xc[0] <= opt.a_max)) early = Termination::big_rip;

    const double limit = std::min(t_cur, t_stop);
    detail::OdeState xs;
    while (sample_time(next) <= limit + slack) {
      const double ts = std::min(sample_time(next), t_stop);
      stepper.calc_state(ts, xs);
      if (early && !(xs[1] >= 0.0 && xs[2] >= 0.0 && xs[0] <= opt.a_max)) break;
      run.trajectory.append(detail::sample_row(ts, xs, params));
      ++next;
    }

    if (early && t_cur <= t_stop) {
      if (run.trajectory.back()[0] < t_cur) run.trajectory.append(detail::sample_row(t_cur, xc, params));
      run.reason = *early;
      run.t_end = t_cur;
      return run;
    }
    if (t_cur >= t_stop - slack) {
      if (run.trajectory.back()[0] < t_stop - slack) {
        stepper.calc_state(t_stop, xs);
        run.trajectory.append(detail::sample_row(t_stop, xs, params));
      }
      run.reason = Termination::t_final_reached;
      run.t_end = t_stop;
      return run;
    }
  }
}

}  // namespace nlqg::cosmo
