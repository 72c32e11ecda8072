#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "timelens/units.hpp"

namespace timelens {

/// Faddeeva function w(z) = exp(−z²)·erfc(−iz) for Im z ≥ 0, via Weideman's
/// rational series (J.A.C. Weideman, SIAM J. Numer. Anal. 31, 1994). N = 48
/// terms keep the error well below 1e-10 over the upper half-plane; the
/// coefficients are computed once by a direct DFT.
inline std::complex<double> faddeeva(std::complex<double> z) {
  if (z.imag() < 0.0)
    throw std::invalid_argument("faddeeva: defined for Im z >= 0 only");

  constexpr int n_terms = 48;
  static const double big_l = std::sqrt(n_terms / std::sqrt(2.0));
  static const std::vector<double> coeff = [] {
    const int m = 2 * n_terms;
    const int m2 = 2 * m;
    std::vector<double> f(m2, 0.0);
    for (int idx = 1; idx < m2; ++idx) {
      const double theta = (idx - m) * pi / m;
      const double t = big_l * std::tan(0.5 * theta);
      f[idx] = std::exp(-t * t) * (big_l * big_l + t * t);
    }
    std::vector<double> shifted(m2);
    for (int i = 0; i < m2; ++i) shifted[i] = f[(i + m) % m2];
    std::vector<double> a(n_terms + 1, 0.0);
    for (int k = 1; k <= n_terms; ++k) {
      double sum = 0.0;
      for (int i = 0; i < m2; ++i)
        sum += shifted[i] * std::cos(two_pi * i * k / m2);
      a[k] = sum / m2;
    }
    return a;
  }();

  const std::complex<double> iz(-z.imag(), z.real());
  const std::complex<double> lmiz = big_l - iz;                // L - iz
  const std::complex<double> big_z = (big_l + iz) / lmiz;      // (L+iz)/(L-iz)
  std::complex<double> p = 0.0;
  for (int k = n_terms; k >= 1; --k) p = p * big_z + coeff[k];
  return 2.0 * p / (lmiz * lmiz) + (1.0 / std::sqrt(pi)) / lmiz;
}

/// Derivative w'(z) = −2z·w(z) + 2i/√π.
inline std::complex<double> faddeeva_derivative(std::complex<double> z,
                                                std::complex<double> w) {
  return -2.0 * z * w + std::complex<double>(0.0, 2.0 / std::sqrt(pi));
}

/// Normalized Voigt profile: Gaussian of standard deviation sigma convolved
/// with a Lorentzian of HWHM gamma, unit area.
inline double voigt_profile(double x, double sigma, double gamma) {
  const double denom = sigma * std::sqrt(2.0);
  const std::complex<double> z(x / denom, gamma / denom);
  return faddeeva(z).real() / (sigma * std::sqrt(two_pi));
}

}  // namespace timelens
