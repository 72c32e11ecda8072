#pragma once

#include <cmath>
#include <limits>

namespace timelens {

inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

/// Gaussian intensity FWHM per standard deviation, 2*sqrt(2*ln 2).
inline constexpr double fwhm_per_sigma = 2.3548200450309493;

/// Time-bandwidth product (intensity FWHMs) of a transform-limited Gaussian,
/// 2*ln(2)/pi.
inline constexpr double gaussian_tbp = 0.44127120030530324;

inline double wavelength_to_frequency(double lambda_m) {
  return speed_of_light / lambda_m;
}

inline double frequency_to_wavelength(double f_hz) {
  return speed_of_light / f_hz;
}

/// Frequency width -> wavelength width at a given carrier wavelength,
/// |dλ| = λ²·|df|/c.
inline double bandwidth_to_wavelength(double df_hz, double carrier_m) {
  return carrier_m * carrier_m * df_hz / speed_of_light;
}

/// Wavelength width -> frequency width at a given carrier wavelength.
inline double bandwidth_to_frequency(double dlambda_m, double carrier_m) {
  return speed_of_light * dlambda_m / (carrier_m * carrier_m);
}

/// Group delay dispersion Φ [s²/rad] of a fiber dispersion D [s/m]
/// (ns/nm and s/m are the same number): Φ = D·λ²/(2πc).
inline double gdd_from_dispersion(double d_s_per_m, double carrier_m) {
  return d_s_per_m * carrier_m * carrier_m / (two_pi * speed_of_light);
}

inline double dispersion_from_gdd(double gdd_s2, double carrier_m) {
  return gdd_s2 * two_pi * speed_of_light / (carrier_m * carrier_m);
}

/// Wrap x into [0, modulus). modulus = +inf leaves x untouched.
inline double wrap_phase(double x, double modulus) {
  if (!std::isfinite(modulus)) return x;
  double r = x - modulus * std::floor(x / modulus);
  if (r >= modulus) r -= modulus;  // rounding at the seam
  if (r < 0.0) r = 0.0;
  return r;
}

inline double amplitude_from_db(double db) { return std::pow(10.0, db / 20.0); }

inline double power_from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace timelens
