#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "timelens/faddeeva.hpp"
#include "timelens/fitting.hpp"
#include "timelens/photonics.hpp"
#include "timelens/signal.hpp"
#include "timelens/units.hpp"

namespace timelens {

/// Figures of merit extracted from an input/output spectrum pair.
struct SpectralMetrics {
  double enhancement = 0.0;         // peak out / peak in
  double efficiency = 0.0;          // energy inside the compressed peak
  double fwhm_hz = 0.0;             // output FWHM (Gaussian fit)
  double fwhm_pm = 0.0;             // same, as wavelength at the carrier
  double compression_factor = 0.0;  // FWHM_in / FWHM_out
  double input_fwhm_hz = 0.0;
  bool includes_loss = false;
};

struct GaussianFitResult {
  double center_hz = 0.0;
  double fwhm_hz = 0.0;
  double peak = 0.0;
  double residual_rms = 0.0;  // rms residual over the fit window / peak
  int iterations = 0;
};

struct VoigtFitResult {
  double gaussian_fwhm_hz = 0.0;
  double lorentzian_fwhm_hz = 0.0;  // fixed input, echoed back
  double center_hz = 0.0;
  double peak = 0.0;
  double residual_rms = 0.0;
};

/// Longitudinal-mode comb: the spectral envelope sampled at multiples of the
/// repetition rate.
struct CombSpectrum {
  double mode_spacing_hz = 0.0;
  std::vector<double> mode_frequencies_hz;
  std::vector<double> intensities;
};

inline double peak_enhancement(const SpectralAmplitude& in_spec,
                               const SpectralAmplitude& out_spec) {
  if (!(in_spec.grid == out_spec.grid))
    throw std::invalid_argument("peak_enhancement: spectra on different grids");
  double peak_in = 0.0, peak_out = 0.0;
  for (const auto& a : in_spec.samples) peak_in = std::max(peak_in, std::norm(a));
  for (const auto& a : out_spec.samples) peak_out = std::max(peak_out, std::norm(a));
  if (!(peak_in > 0.0))
    throw std::invalid_argument("peak_enhancement: zero input peak");
  return peak_out / peak_in;
}

namespace detail {

struct PeakEstimate {
  std::size_t argmax = 0;
  double peak = 0.0;
  double center = 0.0;
  double fwhm = 0.0;
  std::size_t bins_above_half = 0;
};

/// Discrete peak location plus linearly interpolated half-maximum crossings.
inline PeakEstimate estimate_peak(std::span<const double> x,
                                  std::span<const double> y) {
  PeakEstimate est;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] > est.peak) {
      est.peak = y[i];
      est.argmax = i;
    }
  if (!(est.peak > 0.0)) throw std::runtime_error("peak estimate: empty data");
  const double half = 0.5 * est.peak;

  double x_lo = x.front();
  for (std::size_t i = est.argmax; i-- > 0;) {
    if (y[i] < half) {
      const double w = (half - y[i]) / (y[i + 1] - y[i]);
      x_lo = x[i] + w * (x[i + 1] - x[i]);
      break;
    }
  }
  double x_hi = x.back();
  for (std::size_t i = est.argmax + 1; i < y.size(); ++i) {
    if (y[i] < half) {
      const double w = (y[i - 1] - half) / (y[i - 1] - y[i]);
      x_hi = x[i - 1] + w * (x[i] - x[i - 1]);
      break;
    }
  }
  est.center = 0.5 * (x_lo + x_hi);
  est.fwhm = x_hi - x_lo;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] >= half && x[i] >= x_lo && x[i] <= x_hi) ++est.bins_above_half;
  return est;
}

}  // namespace detail

/// Nonlinear least-squares Gaussian fit of a peak in (x, y) data, initialized
/// from the discrete maximum and half-maximum crossings. Only points within
/// window_hint of the initial centre enter the fit (window_hint <= 0 picks
/// twice the initial FWHM).
inline GaussianFitResult fit_gaussian(std::span<const double> x,
                                      std::span<const double> y,
                                      double window_hint = 0.0) {
  if (x.size() != y.size() || x.size() < 5)
    throw std::runtime_error("fit_gaussian: need at least 5 samples");
  const auto est = detail::estimate_peak(x, y);
  if (est.bins_above_half < 5)
    throw std::runtime_error("fit_gaussian: under-resolved peak (< 5 bins above half maximum)");

  const double window = window_hint > 0.0 ? window_hint : 2.0 * est.fwhm;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - est.center) <= window) {
      xs.push_back((x[i] - est.center) / est.fwhm);
      ys.push_back(y[i] / est.peak);
    }
  if (xs.size() < 5) throw std::runtime_error("fit_gaussian: fit window too narrow");

  detail::LevenbergMarquardt::Model model =
      [&](std::span<const double> p, std::vector<double>& r,
          std::vector<std::vector<double>>& jac) {
        const double amp = p[0], c = p[1], sigma = std::abs(p[2]);
        r.resize(xs.size());
        jac.assign(xs.size(), std::vector<double>(3));
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const double u = xs[i] - c;
          const double g = std::exp(-0.5 * u * u / (sigma * sigma));
          r[i] = amp * g - ys[i];
          jac[i][0] = g;
          jac[i][1] = amp * g * u / (sigma * sigma);
          jac[i][2] = amp * g * u * u / (sigma * sigma * sigma) *
                      (p[2] < 0.0 ? -1.0 : 1.0);
        }
      };
  auto lm = detail::LevenbergMarquardt::fit(model, {1.0, 0.0, 1.0 / fwhm_per_sigma});
  if (!lm.converged || !std::isfinite(lm.cost))
    throw std::runtime_error("fit_gaussian: did not converge");

  GaussianFitResult result;
  result.peak = lm.params[0] * est.peak;
  result.center_hz = est.center + lm.params[1] * est.fwhm;
  result.fwhm_hz = fwhm_per_sigma * std::abs(lm.params[2]) * est.fwhm;
  result.residual_rms =
      std::sqrt(lm.cost / static_cast<double>(xs.size())) / lm.params[0];
  result.iterations = lm.iterations;
  if (!(result.fwhm_hz > 0.0))
    throw std::runtime_error("fit_gaussian: degenerate width");
  return result;
}

/// Gaussian fit of the compressed spectral peak (intensity domain).
inline GaussianFitResult fit_gaussian_peak(const SpectralAmplitude& spec,
                                           double window_hint_hz = 0.0) {
  const std::size_t n = spec.samples.size();
  std::vector<double> x(n), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = spec.freq_at(static_cast<std::int64_t>(k));
    y[k] = std::norm(spec.samples[k]);
  }
  return fit_gaussian(x, y, window_hint_hz);
}

/// Fraction of the output energy inside the fitted peak. The window is the
/// fitted centre ± 1.5·FWHM (a 3-FWHM-wide window holds 99.96% of an ideal
/// Gaussian and excludes the wrong-direction side peaks).
inline double efficiency(const SpectralAmplitude& out_spec,
                         const GaussianFitResult& fit) {
  if (!(fit.fwhm_hz > 0.0))
    throw std::invalid_argument("efficiency: invalid fit");
  const double half_window = 1.5 * fit.fwhm_hz;
  double inside = 0.0, total = 0.0;
  for (std::int64_t k = 0; k < out_spec.grid.n_samples; ++k) {
    const double w = std::norm(out_spec.samples[k]);
    total += w;
    if (std::abs(out_spec.freq_at(k) - fit.center_hz) <= half_window) inside += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("efficiency: empty spectrum");
  return inside / total;
}

/// Least-squares Voigt fit of a filter scan with the Lorentzian FWHM held
/// fixed at the supplied filter width; the Gaussian FWHM is the deconvolved
/// linewidth.
inline VoigtFitResult voigt_fit_deconvolve(std::span<const double> detunings,
                                           std::span<const double> flux,
                                           double lorentzian_fwhm_hz) {
  if (detunings.size() != flux.size() || detunings.size() < 8)
    throw std::runtime_error("voigt_fit_deconvolve: need at least 8 scan points");
  if (!(lorentzian_fwhm_hz > 0.0))
    throw std::runtime_error("voigt_fit_deconvolve: Lorentzian width must be positive");
  const auto est = detail::estimate_peak(detunings, flux);
  const double span = detunings.back() - detunings.front();
  if (!(est.fwhm > 0.0) || !(span >= 2.0 * est.fwhm))
    throw std::runtime_error("voigt_fit_deconvolve: degenerate scan range (< 2 widths)");

  const double scale = est.fwhm;
  const double gamma = 0.5 * lorentzian_fwhm_hz / scale;  // Lorentzian HWHM
  // Initial Gaussian width from the Olivero-Longbothum approximation
  // FWHM_V ≈ 0.5346·f_L + sqrt(0.2166·f_L² + f_G²).
  const double fl = lorentzian_fwhm_hz;
  const double rest = est.fwhm - 0.5346 * fl;
  const double fg0 = std::sqrt(std::max(rest * rest - 0.2166 * fl * fl,
                                        0.01 * est.fwhm * est.fwhm));
  double sigma0 = fg0 / fwhm_per_sigma / scale;
  sigma0 = std::max(sigma0, 0.02);

  std::vector<double> xs(detunings.size()), ys(flux.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = (detunings[i] - est.center) / scale;
    ys[i] = flux[i] / est.peak;
  }

  detail::LevenbergMarquardt::Model model =
      [&](std::span<const double> p, std::vector<double>& r,
          std::vector<std::vector<double>>& jac) {
        const double amp = p[0], c = p[1];
        const double sigma = std::abs(p[2]);
        const double sign = p[2] < 0.0 ? -1.0 : 1.0;
        r.resize(xs.size());
        jac.assign(xs.size(), std::vector<double>(3));
        const double denom = sigma * std::sqrt(2.0);
        const double norm = 1.0 / (sigma * std::sqrt(two_pi));
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const double u = xs[i] - c;
          const std::complex<double> z(u / denom, gamma / denom);
          const std::complex<double> w = faddeeva(z);
          const std::complex<double> dw = faddeeva_derivative(z, w);
          const double v = w.real() * norm;
          const double dv_du = dw.real() / denom * norm;
          const double dv_dsigma =
              -(std::real(dw * z) + w.real()) / sigma * norm;
          r[i] = amp * v - ys[i];
          jac[i][0] = v;
          jac[i][1] = -amp * dv_du;
          jac[i][2] = amp * dv_dsigma * sign;
        }
      };
  const double amp0 = 1.0 / voigt_profile(0.0, sigma0, gamma);
  auto lm = detail::LevenbergMarquardt::fit(model, {amp0, 0.0, sigma0});
  if (!lm.converged || !std::isfinite(lm.cost))
    throw std::runtime_error("voigt_fit_deconvolve: did not converge");

  VoigtFitResult result;
  result.gaussian_fwhm_hz = fwhm_per_sigma * std::abs(lm.params[2]) * scale;
  result.lorentzian_fwhm_hz = lorentzian_fwhm_hz;
  result.center_hz = est.center + lm.params[1] * scale;
  result.peak =
      lm.params[0] *
      voigt_profile(0.0, std::abs(lm.params[2]), gamma) * est.peak;
  result.residual_rms = std::sqrt(lm.cost / static_cast<double>(xs.size()));
  return result;
}

/// Sample the spectral envelope at offset + k·rep_rate (nearest bin); the mode
/// intensity equals the envelope bin exactly.
inline CombSpectrum comb_sample(const SpectralAmplitude& spec, double rep_rate_hz,
                                double offset_hz = 0.0) {
  if (!(rep_rate_hz >= spec.df()))
    throw std::invalid_argument("comb_sample: repetition rate below grid resolution");
  const double f_min = spec.freq_at(0);
  const double f_max = spec.freq_at(spec.grid.n_samples - 1);
  CombSpectrum comb;
  comb.mode_spacing_hz = rep_rate_hz;
  const auto k_lo = static_cast<std::int64_t>(std::ceil((f_min - offset_hz) / rep_rate_hz));
  const auto k_hi = static_cast<std::int64_t>(std::floor((f_max - offset_hz) / rep_rate_hz));
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    const double f = offset_hz + static_cast<double>(k) * rep_rate_hz;
    const std::int64_t bin = spec.grid.bin_of_freq(f);
    if (bin < 0 || bin >= spec.grid.n_samples) continue;
    comb.mode_frequencies_hz.push_back(f);
    comb.intensities.push_back(std::norm(spec.samples[static_cast<std::size_t>(bin)]));
  }
  return comb;
}

/// Transmitted energy through the filter for each detuning of its resonance.
inline std::vector<double> flux_through_filter(const SpectralAmplitude& spec,
                                               const FabryPerotFilter& filter,
                                               std::span<const double> detunings_hz) {
  std::vector<double> flux(detunings_hz.size());
  for (std::size_t i = 0; i < detunings_hz.size(); ++i) {
    FabryPerotFilter f = filter;
    f.detuning_hz = detunings_hz[i];
    flux[i] = transmitted_energy(spec, f);
  }
  return flux;
}

}  // namespace timelens
