#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "timelens/fft.hpp"
#include "timelens/grid.hpp"
#include "timelens/units.hpp"

namespace timelens {

/// Complex optical field envelope on a temporal grid, relative to an explicit
/// carrier. Energy is Σ|a|²·dt.
struct ComplexEnvelope {
  TemporalGrid grid;
  std::vector<std::complex<double>> samples;
  double carrier_hz = 0.0;
};

/// Complex spectral amplitude on the conjugate frequency grid (detuning from
/// the carrier). Energy is Σ|A|²·df and equals the temporal energy (Parseval).
struct SpectralAmplitude {
  TemporalGrid grid;
  std::vector<std::complex<double>> samples;
  double carrier_hz = 0.0;

  double df() const { return grid.df(); }
  double freq_at(std::int64_t k) const { return grid.freq_at(k); }
};

inline double energy(const ComplexEnvelope& env) {
  double sum = 0.0;
  for (const auto& a : env.samples) sum += std::norm(a);
  return sum * env.grid.dt;
}

inline double energy(const SpectralAmplitude& spec) {
  double sum = 0.0;
  for (const auto& a : spec.samples) sum += std::norm(a);
  return sum * spec.df();
}

inline std::vector<double> intensity(const SpectralAmplitude& spec) {
  std::vector<double> out(spec.samples.size());
  for (std::size_t k = 0; k < spec.samples.size(); ++k)
    out[k] = std::norm(spec.samples[k]);
  return out;
}

namespace detail {

inline void check_envelope(const ComplexEnvelope& env, const char* who) {
  if (static_cast<std::int64_t>(env.samples.size()) != env.grid.n_samples)
    throw std::invalid_argument(std::string(who) +
                                ": sample count does not match grid");
}

inline void check_spectrum(const SpectralAmplitude& spec, const char* who) {
  if (static_cast<std::int64_t>(spec.samples.size()) != spec.grid.n_samples)
    throw std::invalid_argument(std::string(who) +
                                ": sample count does not match grid");
}

// Sign factor exp(iπn/2) of the centred DFT for even n.
inline double centre_sign(std::int64_t n) { return (n / 2) % 2 == 0 ? 1.0 : -1.0; }

}  // namespace detail

/// Continuous-limit Fourier transform on centred grids,
///   A(f_k) = dt · Σ_j a(t_j)·exp(+2πi·f_k·t_j),
/// realized exactly through one FFT and alternating-sign factors. Inverse of
/// to_envelope; Parseval Σ|A|²·df = Σ|a|²·dt holds to machine precision.
inline SpectralAmplitude to_spectrum(const ComplexEnvelope& env) {
  detail::check_envelope(env, "to_spectrum");
  const std::int64_t n = env.grid.n_samples;
  std::vector<std::complex<double>> x(n), y(n);
  for (std::int64_t j = 0; j < n; ++j)
    x[j] = (j & 1) ? -env.samples[j] : env.samples[j];
  detail::fft_execute(x.data(), y.data(), static_cast<std::size_t>(n),
                      detail::fft_backward);
  const double scale = env.grid.dt * detail::centre_sign(n);
  SpectralAmplitude spec{env.grid, std::vector<std::complex<double>>(n),
                         env.carrier_hz};
  for (std::int64_t k = 0; k < n; ++k)
    spec.samples[k] = ((k & 1) ? -scale : scale) * y[k];
  return spec;
}

/// Inverse transform, a(t_j) = df · Σ_k A(f_k)·exp(−2πi·f_k·t_j).
inline ComplexEnvelope to_envelope(const SpectralAmplitude& spec) {
  detail::check_spectrum(spec, "to_envelope");
  const std::int64_t n = spec.grid.n_samples;
  std::vector<std::complex<double>> x(n), y(n);
  for (std::int64_t k = 0; k < n; ++k)
    x[k] = (k & 1) ? -spec.samples[k] : spec.samples[k];
  detail::fft_execute(x.data(), y.data(), static_cast<std::size_t>(n),
                      detail::fft_forward);
  const double scale = spec.df() * detail::centre_sign(n);
  ComplexEnvelope env{spec.grid, std::vector<std::complex<double>>(n),
                      spec.carrier_hz};
  for (std::int64_t j = 0; j < n; ++j)
    env.samples[j] = ((j & 1) ? -scale : scale) * y[j];
  return env;
}

/// Multiply each spectral sample by exp(i·phase_fn(ω)), ω the angular detuning
/// from the carrier. Energy-preserving.
inline SpectralAmplitude apply_spectral_phase(
    const SpectralAmplitude& spec, const std::function<double(double)>& phase_fn) {
  detail::check_spectrum(spec, "apply_spectral_phase");
  SpectralAmplitude out = spec;
  const std::int64_t n = spec.grid.n_samples;
  for (std::int64_t k = 0; k < n; ++k) {
    const double phase = phase_fn(two_pi * spec.freq_at(k));
    if (!std::isfinite(phase))
      throw std::invalid_argument("apply_spectral_phase: non-finite phase");
    out.samples[k] *= std::polar(1.0, phase);
  }
  return out;
}

/// Multiply each temporal sample by exp(i·phase[j]). Energy-preserving.
inline ComplexEnvelope apply_temporal_phase(const ComplexEnvelope& env,
                                            std::span<const double> phase) {
  detail::check_envelope(env, "apply_temporal_phase");
  if (phase.size() != env.samples.size())
    throw std::invalid_argument("apply_temporal_phase: phase length mismatch");
  ComplexEnvelope out = env;
  for (std::size_t j = 0; j < phase.size(); ++j) {
    if (!std::isfinite(phase[j]))
      throw std::invalid_argument("apply_temporal_phase: non-finite phase");
    out.samples[j] *= std::polar(1.0, phase[j]);
  }
  return out;
}

/// Scale the field so the energy is multiplied by exactly the power
/// transmission T ∈ [0, 1].
inline ComplexEnvelope apply_transmission(const ComplexEnvelope& env,
                                          double power_transmission) {
  detail::check_envelope(env, "apply_transmission");
  if (!(power_transmission >= 0.0 && power_transmission <= 1.0))
    throw std::invalid_argument(
        "apply_transmission: power transmission outside [0, 1]");
  ComplexEnvelope out = env;
  const double amp = std::sqrt(power_transmission);
  for (auto& a : out.samples) a *= amp;
  return out;
}

}  // namespace timelens
