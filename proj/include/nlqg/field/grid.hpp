#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "nlqg/error.hpp"

namespace nlqg {

/// Periodic box sampled uniformly along every axis.
///
/// Node i sits at x_i = -L/2 + i*dx, so a box of length L covers [-L/2, L/2).
/// Wavenumbers follow FFT ordering: k_i = 2*pi*i/L for i < N/2, and
/// 2*pi*(i - N)/L otherwise. Index N/2 is the Nyquist mode.
struct GridSpec {
  int dim = 1;
  std::size_t points = 512;
  double length = 40.0;

  void validate() const {
    require(dim == 1 || dim == 2, "grid.dim must be 1 or 2, got " + std::to_string(dim));
    require(points >= 8, "grid.points must be >= 8, got " + std::to_string(points));
    require(std::isfinite(length) && length > 0.0, "grid.length must be > 0");
  }

  double spacing() const { return length / static_cast<double>(points); }

  double coordinate(std::size_t i) const {
    return -0.5 * length + static_cast<double>(i) * spacing();
  }

  double wavenumber(std::size_t i) const {
    const auto n = static_cast<long long>(points);
    auto m = static_cast<long long>(i);
    if (m >= n / 2 + (n % 2)) m -= n;
    return 2.0 * std::numbers::pi * static_cast<double>(m) / length;
  }

  bool is_nyquist(std::size_t i) const { return points % 2 == 0 && i == points / 2; }

  /// Largest |k| along one axis.
  double k_max() const { return std::numbers::pi / spacing(); }

  /// Number of nodes of a one-particle field.
  std::size_t node_count() const { return dim == 1 ? points : points * points; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

}  // namespace nlqg
