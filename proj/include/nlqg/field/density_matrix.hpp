#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "nlqg/error.hpp"
#include "nlqg/field/observable.hpp"
#include "nlqg/field/wave_field.hpp"

namespace nlqg {

/// Reduced state of one particle on a 1D grid, as a points x points matrix
/// acting on grid vectors (so the trace is a plain sum of diagonal entries).
struct DensityMatrix {
  GridSpec grid{};
  Eigen::MatrixXcd entries;

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }

  Complex trace() const { return entries.trace(); }

  /// Tr rho^2 = sum |rho_ij|^2 for Hermitian rho.
  double purity() const { return entries.cwiseAbs2().sum(); }

  double hermiticity_error() const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  }

  Eigen::VectorXd eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
  }

  /// Diagonal as a probability per grid node.
  Eigen::VectorXd populations() const { return entries.diagonal().real(); }
};

namespace detail {

inline DensityMatrix reduced_b(const WaveField& pair) {
  const auto n = static_cast<Eigen::Index>(pair.extent());
  // Row-major (x_a, x_b) storage viewed as a column-major matrix is M^T,
  // i.e. rows indexed by x_b.
  Eigen::Map<const Eigen::MatrixXcd> mt(pair.values().data(), n, n);
  DensityMatrix rho{pair.grid(), mt * mt.adjoint()};
  rho.entries *= pair.cell_volume() / pair.norm_squared();
  rho.entries = 0.5 * (rho.entries + rho.entries.adjoint()).eval();
  return rho;
}

}  // namespace detail

/// rho_b = Tr_a |Phi><Phi|, with matrix elements
///   rho_b[x, x'] = sum_{x_a} Phi(x_a, x) conj(Phi(x_a, x')) dx^2.
/// The result is divided by ||Phi||^2, so it has unit trace to rounding.
inline DensityMatrix partial_trace_b(const WaveField& pair) {
  require(pair.particle_count() == 2, "partial_trace_b: expects a two-particle field");
  detail::check_finite(pair);
  detail::require_normalized(pair, "partial_trace_b");
  return detail::reduced_b(pair);
}

/// Pure state |psi><psi| of a normalized one-particle 1D field.
inline DensityMatrix pure_state(const WaveField& psi) {
  require(psi.rank() == 1, "pure_state: expects a one-particle 1D field");
  const auto n = static_cast<Eigen::Index>(psi.extent());
  Eigen::Map<const Eigen::VectorXcd> v(psi.values().data(), n);
  DensityMatrix rho{psi.grid(), v * v.adjoint()};
  rho.entries *= psi.cell_volume() / psi.norm_squared();
  return rho;
}

/// Tr(rho B) for a position multiplier B.
inline double expectation(const DensityMatrix& rho, const Observable& obs) {
  require(obs.kind == Observable::Kind::position && obs.samples.size() == rho.size(),
          "density-matrix expectation supports 1D position multipliers");
  const Eigen::VectorXd p = rho.populations();
  double acc = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) acc += p[static_cast<Eigen::Index>(i)] * obs.samples[i];
  return acc;
}

/// Half the trace norm of rho1 - rho2, in [0, 1].
inline double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  require(rho1.size() == rho2.size(), "trace_distance: size mismatch");
  require(rho1.grid == rho2.grid, "trace_distance: grid mismatch");
  const Eigen::MatrixXcd diff = rho1.entries - rho2.entries;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
  const double d = 0.5 * solver.eigenvalues().cwiseAbs().sum();
  return std::clamp(d, 0.0, 1.0);
}

}  // namespace nlqg
