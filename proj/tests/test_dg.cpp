#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlqg/dg/continuity.hpp"
#include "nlqg/dg/evolve.hpp"
#include "nlqg/dg/pair.hpp"
#include "nlqg/dg/rhs.hpp"
#include "nlqg/dg/stepper.hpp"
#include "nlqg/field/fft.hpp"
#include "support.hpp"

using namespace nlqg;
using nlqg::test::free_propagate;
using nlqg::test::gaussian;
using nlqg::test::random_field;

namespace {

constexpr double kPi = std::numbers::pi;

WaveField run_rk4(WaveField psi, const DGParams& p, double t_final, double dt) {
  const auto n = static_cast<std::size_t>(std::llround(t_final / dt));
  for (std::size_t i = 0; i < n; ++i) psi = step_rk4(psi, p, dt);
  return psi;
}

DGParams nonlinear() {
  DGParams p;
  p.D = 0.05;
  p.r.c = {0.1, -0.02, 0.03, 0.01, -0.04};
  p.potential = {Potential::Kind::cosine, 0.3, 0.0};
  return p;
}

double norm_rate(const WaveField& psi, const DGParams& p) {
  return 2.0 * inner_product(psi, dg_rhs(psi, p)).real();
}

}  // namespace

TEST(DGParams, NegativeDiffusionNeedsExplicitOptIn) {
  DGParams p;
  p.D = -0.1;
  EXPECT_THROW(p.validate(), ValidationError);
  p.allow_negative_D = true;
  EXPECT_NO_THROW(p.validate());
}

TEST(DGParams, PairSidesMustShareFloor) {
  PairParams pp;
  pp.b.floor = 1e-10;
  EXPECT_THROW(pp.validate(), ValidationError);
}

TEST(DGRhs, LinearLimitIsFreeSchrodinger) {
  const GridSpec g{1, 128, 20.0};
  const WaveField psi = random_field(g, 1, 1);
  const WaveField rhs = dg_rhs(psi, DGParams{});
  WaveField expect = laplacian(psi);
  expect *= Complex{0.0, 0.5};
  EXPECT_LT(test::max_abs_diff(rhs, expect), 1e-12);
}

TEST(DGRhs, IsHomogeneousOfDegreeOne) {
  const GridSpec g{1, 128, 20.0};
  const DGParams p = nonlinear();
  for (unsigned seed = 2; seed < 6; ++seed) {
    const WaveField psi = random_field(g, 1, seed);
    for (Complex z : {Complex{2.5, 0.0}, Complex{0.0, -0.7}, Complex{-1.3, 0.4}}) {
      WaveField zpsi = psi;
      zpsi *= z;
      WaveField expect = dg_rhs(psi, p);
      expect *= z;
      EXPECT_LT(test::max_abs_diff(dg_rhs(zpsi, p), expect), 1e-9 * test::max_abs(expect));
    }
  }
}

TEST(DGRhs, PlaneWaveIsTransparentToDiffusionTerm) {
  const GridSpec g{1, 64, 10.0};
  const double k = 3.0 * 2.0 * kPi / g.length;
  WaveField psi = sample_field(g, 1, [&](double x) { return std::polar(1.0, k * x); });
  psi.normalize();
  DGParams p;
  p.D = 0.3;
  EXPECT_LT(test::max_abs_diff(dg_rhs(psi, p), dg_rhs(psi, DGParams{})), 1e-11);
}

TEST(DGRhs, NonlinearTermsConserveNorm) {
  const GridSpec g{1, 128, 20.0};
  for (unsigned seed = 7; seed < 12; ++seed) {
    const WaveField psi = random_field(g, 1, seed);
    EXPECT_NEAR(norm_rate(psi, nonlinear()), 0.0, 1e-10);
  }
}

TEST(DGRhs, TwoDimensionalProductSeparates) {
  const GridSpec g1{1, 64, 20.0};
  GridSpec g2 = g1;
  g2.dim = 2;
  const WaveField fx = random_field(g1, 1, 13), fy = random_field(g1, 1, 14);
  WaveField psi(g2, 1);
  for (std::size_t i = 0; i < g1.points; ++i)
    for (std::size_t j = 0; j < g1.points; ++j) psi(i, j) = fx[i] * fy[j];
  DGParams p;
  p.D = 0.1;
  // the floor scales with the mean density, which differs between the 1D and
  // 2D fields; a negligible floor isolates the separation property
  p.floor = 1e-20;
  const WaveField rx = dg_rhs(fx, p), ry = dg_rhs(fy, p);
  const WaveField r = dg_rhs(psi, p);
  double worst = 0.0;
  for (std::size_t i = 0; i < g1.points; ++i)
    for (std::size_t j = 0; j < g1.points; ++j)
      worst = std::max(worst, std::abs(r(i, j) - (rx[i] * fy[j] + fx[i] * ry[j])));
  EXPECT_LT(worst, 1e-8 * test::max_abs(r));
}

TEST(DGRhs, NonFiniteInputIsRejected) {
  const GridSpec g{1, 32, 10.0};
  WaveField psi = random_field(g, 1, 15);
  psi[3] = Complex{std::nan(""), 0.0};
  EXPECT_THROW(dg_rhs(psi, DGParams{}), ValidationError);
}

TEST(Stepper, SuggestedStepFollowsStiffestMode) {
  const GridSpec g{1, 64, 10.0};
  DGParams p;
  p.D = 0.2;
  const double k2 = std::pow(kPi / g.spacing(), 2);
  EXPECT_DOUBLE_EQ(suggest_dt(g, p), 0.1 / (0.5 * k2 + 0.2 * k2));
  const GridSpec g2{2, 64, 10.0};
  EXPECT_DOUBLE_EQ(suggest_dt(g2, p), 0.1 / (0.7 * 2.0 * k2));
}

TEST(Stepper, RK4IsFourthOrder) {
  const GridSpec g{1, 64, 20.0};
  const WaveField psi0 = gaussian(g, 0.0, 1.0, 1.0);
  const double T = 1.0;
  const WaveField exact = free_propagate(psi0, T);
  const double e1 = test::max_abs_diff(run_rk4(psi0, DGParams{}, T, 0.02), exact);
  const double e2 = test::max_abs_diff(run_rk4(psi0, DGParams{}, T, 0.01), exact);
  EXPECT_NEAR(e1 / e2, 16.0, 16.0 * 0.2) << e1 << " " << e2;
}

TEST(Stepper, NormConservedOverThousandStepsWithDiffusion) {
  const GridSpec g{1, 256, 40.0};
  DGParams p;
  p.D = 0.01;
  const WaveField psi0 = gaussian(g, 0.0, 1.0, 0.5);
  const WaveField psi = run_rk4(psi0, p, 1000 * suggest_dt(g, p), suggest_dt(g, p));
  EXPECT_NEAR(psi.norm_squared(), psi0.norm_squared(), 1e-8);
}

TEST(Stepper, OversizedStepRaisesInstabilityWithStepIndex) {
  const GridSpec g{1, 128, 20.0};
  DGParams p;
  p.D = 0.01;
  const WaveField psi0 = gaussian(g, 0.0, 1.0);
  try {
    evolve(psi0, p, 10.0, 100.0 * suggest_dt(g, p), 1);
    FAIL() << "expected NumericalInstability";
  } catch (const NumericalInstability& e) {
    EXPECT_GE(e.step(), 1u);
  }
}

TEST(Continuity, ResidualConvergesAtSecondOrder) {
  const GridSpec g{1, 512, 40.0};
  DGParams p;
  p.D = 0.01;
  const WaveField psi = gaussian(g, 0.0, 1.0, 0.7);
  const double dt = 0.002;
  const double r1 = continuity_residual(psi, step_rk4(psi, p, dt), dt, p);
  const double r2 = continuity_residual(psi, step_rk4(psi, p, dt / 2), dt / 2, p);
  EXPECT_NEAR(r1 / r2, 4.0, 1.0) << r1 << " " << r2;
}

TEST(Continuity, DiffusionTermIsRequired) {
  const GridSpec g{1, 512, 40.0};
  DGParams p;
  p.D = 0.01;
  const WaveField psi = gaussian(g, 0.0, 1.0, 0.7);
  const double dt = 0.002;
  const WaveField after = step_rk4(psi, p, dt);
  const double with = continuity_residual(psi, after, dt, p, true);
  const double without = continuity_residual(psi, after, dt, p, false);
  EXPECT_GE(without / with, 100.0);
}

TEST(Evolve, FreeGaussianDispersion) {
  const GridSpec g{1, 256, 40.0};
  const double sigma0 = 1.0;
  const WaveField psi0 = gaussian(g, 0.0, sigma0);
  const auto r = evolve(psi0, DGParams{}, 2.0, suggest_dt(g, DGParams{}), 200);
  for (const auto& row : r.diagnostics.rows) {
    const double t = row[0];
    const double expect = sigma0 * sigma0 * (1.0 + std::pow(t / (2.0 * sigma0 * sigma0), 2));
    EXPECT_NEAR(row[3] / expect, 1.0, 1e-6) << "t = " << t;
  }
}

TEST(Evolve, SamplesLandOnFinalTime) {
  const GridSpec g{1, 64, 20.0};
  const auto r = evolve(gaussian(g, 0.0, 1.0), DGParams{}, 0.105, 0.01, 4);
  EXPECT_DOUBLE_EQ(r.diagnostics.back()[0], 0.105);
  EXPECT_EQ(r.diagnostics.rows.size(), 1u + 2u + 1u);
}

TEST(Evolve, ObservablesAreReported) {
  const GridSpec g{1, 128, 20.0};
  const std::vector<NamedObservable> obs = {
      {"p", Observable::momentum(g, [](double k) { return k; })}};
  const auto r = evolve(gaussian(g, 0.0, 1.0, 0.8), DGParams{}, 0.5, 0.01, 10, obs);
  for (const auto& row : r.diagnostics.rows) EXPECT_NEAR(row[4], 0.8, 1e-10);
}

TEST(Pair, ProductStatesStayProductUnderNonlinearEvolution) {
  const GridSpec g{1, 32, 16.0};
  const WaveField a = gaussian(g, -1.0, 1.2, 0.4), b = gaussian(g, 0.5, 1.5, -0.3);
  PairParams pp;
  pp.a.D = 0.05;
  pp.a.potential = {Potential::Kind::harmonic, 0.5, 0.0};
  pp.b.D = 0.08;
  pp.b.r.c = {0.0, 0.02, 0.0, 0.0, 0.0};
  const double dt = suggest_dt(g, pp), T = 0.5;
  const auto pair = evolve_pair(tensor_product(a, b), pp, T, dt, 1000);
  const auto ea = evolve(a, pp.a, T, dt, 1000).final_field;
  const auto eb = evolve(b, pp.b, T, dt, 1000).final_field;
  EXPECT_GE(fidelity(pair.final_field, tensor_product(ea, eb)), 1.0 - 1e-6);
  EXPECT_NEAR(pair.rho_b.back().purity(), 1.0, 1e-6);
}

TEST(Pair, LinearEvolutionCannotSignal) {
  const GridSpec g{1, 32, 16.0};
  const WaveField phi = random_field(g, 2, 20);
  PairParams p1, p2;
  p2.a.potential = {Potential::Kind::harmonic, 1.0, 0.0};
  const double dt = std::min(suggest_dt(g, p1), suggest_dt(g, p2));
  const auto r1 = evolve_pair(phi, p1, 0.5, dt, 50);
  const auto r2 = evolve_pair(phi, p2, 0.5, dt, 50);
  for (std::size_t i = 0; i < r1.rho_b.size(); ++i)
    EXPECT_LE(trace_distance(r1.rho_b[i], r2.rho_b[i]), 1e-8);
}

TEST(Pair, EntangledNonlinearEvolutionDependsOnOtherSide) {
  const GridSpec g{1, 32, 16.0};
  const WaveField phi = random_field(g, 2, 21);
  PairParams p1, p2;
  p1.b.D = p2.b.D = 0.1;
  p2.a.potential = {Potential::Kind::harmonic, 1.0, 0.0};
  const double dt = std::min(suggest_dt(g, p1), suggest_dt(g, p2));
  const auto r1 = evolve_pair(phi, p1, 0.5, dt, 1000);
  const auto r2 = evolve_pair(phi, p2, 0.5, dt, 1000);
  EXPECT_GT(trace_distance(r1.rho_b.back(), r2.rho_b.back()), 1e-6);
}

TEST(Pair, EvolutionIsDeterministic) {
  const GridSpec g{1, 32, 16.0};
  const WaveField phi = random_field(g, 2, 22);
  PairParams pp;
  pp.b.D = 0.1;
  const auto r1 = evolve_pair(phi, pp, 0.1, 0.005, 5);
  const auto r2 = evolve_pair(phi, pp, 0.1, 0.005, 5);
  for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_EQ(r1.final_field[i], r2.final_field[i]);
}
