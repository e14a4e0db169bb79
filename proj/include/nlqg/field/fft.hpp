#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "nlqg/error.hpp"

namespace nlqg::fft {

enum class Direction { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

namespace detail {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// (rank, extent, axis, direction)
using PlanKey = std::tuple<int, std::size_t, int, int>;

// FFTW's planner is not thread-safe; execution of an existing plan is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline fftw_plan plan_for(int rank, std::size_t n, int axis, Direction dir) {
  static std::map<PlanKey, PlanHandle> cache;
  std::lock_guard lock(planner_mutex());
  const PlanKey key{rank, n, axis, static_cast<int>(dir)};
  if (auto it = cache.find(key); it != cache.end()) return it->second.get();

  const std::size_t total = rank == 1 ? n : n * n;
  std::vector<std::complex<double>> scratch(total);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int sign = static_cast<int>(dir);

  fftw_plan plan = nullptr;
  if (rank == 1) {
    plan = fftw_plan_dft_1d(len, buf, buf, sign, flags);
  } else if (axis == 0) {
    // transform along the slow index: stride n, one transform per column
    plan = fftw_plan_many_dft(1, &len, len, buf, nullptr, len, 1, buf, nullptr, len, 1, sign,
                              flags);
  } else {
    plan = fftw_plan_many_dft(1, &len, len, buf, nullptr, 1, len, buf, nullptr, 1, len, sign,
                              flags);
  }
  if (plan == nullptr) throw Error("FFTW failed to create a plan");
  cache.emplace(key, PlanHandle(plan));
  return plan;
}

}  // namespace detail

/// In-place unnormalized DFT along one axis of a rank-1 or rank-2 array
/// with `n` samples per axis. A backward transform does not divide by n.
inline void transform_axis(std::span<std::complex<double>> data, std::size_t n, int rank,
                           int axis, Direction dir) {
  require(rank == 1 || rank == 2, "fft rank must be 1 or 2");
  require(axis >= 0 && axis < rank, "fft axis out of range");
  require(data.size() == (rank == 1 ? n : n * n), "fft buffer size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(detail::plan_for(rank, n, rank == 1 ? 0 : axis, dir), buf, buf);
}

/// Full forward/backward transform over every axis (unnormalized).
inline void transform_all(std::span<std::complex<double>> data, std::size_t n, int rank,
                          Direction dir) {
  for (int axis = 0; axis < rank; ++axis) transform_axis(data, n, rank, axis, dir);
}

}  // namespace nlqg::fft
