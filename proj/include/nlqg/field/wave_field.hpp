#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "nlqg/error.hpp"
#include "nlqg/field/grid.hpp"

namespace nlqg {

using Complex = std::complex<double>;

/// Complex amplitudes on a periodic grid.
///
/// A field is stored as a dense array of rank 1 or 2 with `grid.points`
/// samples per axis, row-major. One-particle fields use `grid.dim` axes; a
/// two-particle field lives on a 1D box and is stored on a points x points
/// lattice indexed (x_a, x_b), so axis 0 belongs to particle a and axis 1 to
/// particle b.
class WaveField {
 public:
  WaveField() = default;

  explicit WaveField(GridSpec grid, int particles = 1) : grid_(grid), particles_(particles) {
    grid_.validate();
    require(particles == 1 || particles == 2, "particle_count must be 1 or 2");
    require(particles == 1 || grid_.dim == 1, "two-particle fields require a 1D grid");
    values_.assign(size_for(grid_, particles_), Complex{});
  }

  WaveField(GridSpec grid, int particles, std::vector<Complex> values)
      : WaveField(grid, particles) {
    require(values.size() == values_.size(), "amplitude array size does not match the grid");
    values_ = std::move(values);
  }

  const GridSpec& grid() const { return grid_; }
  int particle_count() const { return particles_; }
  int rank() const { return grid_.dim * particles_; }
  std::size_t extent() const { return grid_.points; }
  std::size_t size() const { return values_.size(); }

  double cell_volume() const { return std::pow(grid_.spacing(), rank()); }

  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }

  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }

  Complex& operator()(std::size_t i, std::size_t j) { return values_[i * extent() + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return values_[i * extent() + j];
  }

  bool same_shape(const WaveField& other) const {
    return grid_ == other.grid_ && particles_ == other.particles_;
  }

  bool all_finite() const {
    for (const auto& z : values_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  /// Discretized L2 norm squared, sum |psi|^2 * cell volume.
  double norm_squared() const {
    double acc = 0.0;
    for (const auto& z : values_) acc += std::norm(z);
    return acc * cell_volume();
  }

  /// Scales to unit norm; throws on a zero field.
  WaveField& normalize() {
    const double n2 = norm_squared();
    require(n2 > 0.0 && std::isfinite(n2), "cannot normalize a field with zero or non-finite norm");
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& z : values_) z *= scale;
    return *this;
  }

  WaveField& operator*=(Complex z) {
    for (auto& v : values_) v *= z;
    return *this;
  }

  WaveField& operator+=(const WaveField& other) {
    check_shape(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
  }

  WaveField& operator-=(const WaveField& other) {
    check_shape(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
  }

  /// this += alpha * other
  WaveField& add_scaled(Complex alpha, const WaveField& other) {
    check_shape(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += alpha * other.values_[i];
    return *this;
  }

  friend WaveField operator*(Complex z, WaveField f) { return f *= z; }
  friend WaveField operator+(WaveField a, const WaveField& b) { return a += b; }
  friend WaveField operator-(WaveField a, const WaveField& b) { return a -= b; }

  void check_shape(const WaveField& other) const {
    require(same_shape(other), "wave fields live on different grids");
  }

 private:
  static std::size_t size_for(const GridSpec& g, int particles) {
    std::size_t n = 1;
    for (int a = 0; a < g.dim * particles; ++a) n *= g.points;
    return n;
  }

  GridSpec grid_{};
  int particles_ = 1;
  std::vector<Complex> values_;
};

/// Samples f(x) (rank 1) or f(x, y) (rank 2) at the grid nodes.
template <class Fn>
WaveField sample_field(const GridSpec& grid, int particles, Fn&& fn) {
  WaveField out(grid, particles);
  const std::size_t n = grid.points;
  if constexpr (std::is_invocable_v<Fn, double>) {
    require(out.rank() == 1, "sample_field: a rank-2 field needs f(x, y)");
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(grid.coordinate(i));
  } else {
    require(out.rank() == 2, "sample_field: a rank-1 field needs f(x)");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) = fn(grid.coordinate(i), grid.coordinate(j));
  }
  return out;
}

/// psi_a (x) psi_b on the two-particle lattice.
inline WaveField tensor_product(const WaveField& a, const WaveField& b) {
  require(a.rank() == 1 && b.rank() == 1 && a.grid() == b.grid(),
          "tensor_product needs two one-particle fields on the same 1D grid");
  WaveField out(a.grid(), 2);
  const std::size_t n = a.extent();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = a[i] * b[j];
  return out;
}

}  // namespace nlqg
