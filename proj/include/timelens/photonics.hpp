#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "timelens/signal.hpp"
#include "timelens/units.hpp"

namespace timelens {

/// Transform-limited Gaussian pulse source. spectral_fwhm is the intensity
/// FWHM of the spectrum; the temporal FWHM follows from the time-bandwidth
/// product 2·ln2/π.
struct GaussianPulseSource {
  double carrier_wavelength_m = 1560e-9;
  double spectral_fwhm_hz = 68.5e9;
  double energy = 1.0;
  double rep_rate_hz = 80e6;  // used for longitudinal-mode sampling only

  double carrier_hz() const { return wavelength_to_frequency(carrier_wavelength_m); }
  double temporal_fwhm_s() const { return gaussian_tbp / spectral_fwhm_hz; }
};

/// Group-delay-dispersion element (CFBG module or cascade).
struct DispersiveElement {
  double dispersion_ns_per_nm = 10.0;  // numerically equal to s/m
  double carrier_wavelength_m = 1560e-9;
  double power_transmission = 1.0;

  double gdd() const {
    return gdd_from_dispersion(dispersion_ns_per_nm, carrier_wavelength_m);
  }
};

/// Fabry-Pérot interference filter, Airy transmission
///   T(f) = peak / (1 + (2F/π)²·sin²(π(f−detuning)/fsr)),  F = fsr/fwhm.
struct FabryPerotFilter {
  double fwhm_hz = 420e6;
  double fsr_hz = 0.0;
  double peak_transmission = 1.0;
  double detuning_hz = 0.0;

  double finesse() const { return fsr_hz / fwhm_hz; }
};

inline ComplexEnvelope generate_pulse(const GaussianPulseSource& src,
                                      const TemporalGrid& grid) {
  if (!(src.spectral_fwhm_hz > 0.0))
    throw std::invalid_argument("generate_pulse: spectral FWHM must be positive");
  const double fwhm_t = src.temporal_fwhm_s();
  if (fwhm_t < 8.0 * grid.dt)
    throw std::invalid_argument(
        "generate_pulse: grid does not resolve the pulse (< 8 samples per FWHM)");
  if (src.spectral_fwhm_hz >= 2.0 * grid.nyquist())
    throw std::invalid_argument(
        "generate_pulse: spectral FWHM exceeds the grid Nyquist span");

  // Field a(t) = A·exp(−t²/(2τ²)), τ chosen so the intensity FWHM is fwhm_t.
  const double tau = fwhm_t / (2.0 * std::sqrt(std::log(2.0)));
  ComplexEnvelope env{grid,
                      std::vector<std::complex<double>>(grid.n_samples),
                      src.carrier_hz()};
  double sum = 0.0;
  for (std::int64_t j = 0; j < grid.n_samples; ++j) {
    const double t = grid.time_at(j);
    const double a = std::exp(-t * t / (2.0 * tau * tau));
    env.samples[j] = a;
    sum += a * a;
  }
  const double amp = std::sqrt(src.energy / (sum * grid.dt));
  for (auto& a : env.samples) a *= amp;
  return env;
}

/// Chirp in a dispersive element: spectral phase Φω²/2 plus the element's
/// scalar power transmission. Positive Φ delays higher detunings.
inline ComplexEnvelope apply_cfbg(const ComplexEnvelope& env,
                                  const DispersiveElement& element) {
  const double gdd = element.gdd();
  SpectralAmplitude spec = to_spectrum(env);

  // Temporal-aliasing guard: the grid must hold twice the chirped duration,
  // estimated as |Φ| times the angular intensity FWHM of the spectrum.
  double p0 = 0.0, p1 = 0.0, p2 = 0.0;
  for (std::int64_t k = 0; k < spec.grid.n_samples; ++k) {
    const double w = std::norm(spec.samples[k]);
    const double f = spec.freq_at(k);
    p0 += w;
    p1 += w * f;
    p2 += w * f * f;
  }
  if (p0 > 0.0) {
    const double mean = p1 / p0;
    const double sigma_f = std::sqrt(std::max(0.0, p2 / p0 - mean * mean));
    const double chirped = std::abs(gdd) * two_pi * fwhm_per_sigma * sigma_f;
    if (env.grid.span() < 2.0 * chirped)
      throw std::invalid_argument(
          "apply_cfbg: grid span below twice the expected chirped duration");
  }

  spec = apply_spectral_phase(
      spec, [gdd](double omega) { return 0.5 * gdd * omega * omega; });
  ComplexEnvelope out = to_envelope(spec);
  return apply_transmission(out, element.power_transmission);
}

/// Airy transmission of the filter at absolute detuning f from the carrier.
inline double fp_transmission(const FabryPerotFilter& filter, double f_hz) {
  if (!(filter.finesse() > 1.0))
    throw std::invalid_argument("fp_transmission: finesse must exceed 1");
  const double coeff = 2.0 * filter.finesse() / pi;
  const double s = std::sin(pi * (f_hz - filter.detuning_hz) / filter.fsr_hz);
  return filter.peak_transmission / (1.0 + coeff * coeff * s * s);
}

/// Filter a spectrum: amplitude × √T(f) per bin.
inline SpectralAmplitude apply_filter(const SpectralAmplitude& spec,
                                      const FabryPerotFilter& filter) {
  SpectralAmplitude out = spec;
  for (std::int64_t k = 0; k < spec.grid.n_samples; ++k)
    out.samples[k] *= std::sqrt(fp_transmission(filter, spec.freq_at(k)));
  return out;
}

/// Transmitted energy of a spectrum through the filter, Σ|A|²·T·df.
inline double transmitted_energy(const SpectralAmplitude& spec,
                                 const FabryPerotFilter& filter) {
  double sum = 0.0;
  for (std::int64_t k = 0; k < spec.grid.n_samples; ++k)
    sum += std::norm(spec.samples[k]) * fp_transmission(filter, spec.freq_at(k));
  return sum * spec.df();
}

}  // namespace timelens
