#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "timelens/units.hpp"

namespace timelens {

/// Uniform temporal grid with a power-of-two sample count, centred on t = 0.
/// Index i maps to t_i = (i - n/2)·dt + t_center; the conjugate frequency grid
/// has resolution df = 1/(n·dt) and bin k at f_k = (k - n/2)·df.
struct TemporalGrid {
  std::int64_t n_samples = 0;
  double dt = 0.0;        // s per sample
  double t_center = 0.0;  // s

  double span() const { return static_cast<double>(n_samples) * dt; }
  double df() const { return 1.0 / span(); }
  double nyquist() const { return 0.5 / dt; }

  double time_at(std::int64_t i) const {
    return static_cast<double>(i - n_samples / 2) * dt + t_center;
  }
  double freq_at(std::int64_t k) const {
    return static_cast<double>(k - n_samples / 2) * df();
  }
  /// Nearest grid bin for a frequency offset from the carrier.
  std::int64_t bin_of_freq(double f_hz) const {
    return static_cast<std::int64_t>(std::llround(f_hz / df())) + n_samples / 2;
  }

  bool operator==(const TemporalGrid&) const = default;
};

inline bool is_power_of_two(std::int64_t n) {
  return n > 0 && (n & (n - 1)) == 0;
}

inline TemporalGrid make_grid(std::int64_t n_samples, double dt) {
  if (n_samples < 2 || !is_power_of_two(n_samples))
    throw std::invalid_argument("make_grid: n_samples must be a power of two >= 2");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("make_grid: dt must be positive and finite");
  return TemporalGrid{n_samples, dt, 0.0};
}

}  // namespace timelens
