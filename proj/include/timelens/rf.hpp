#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "timelens/fft.hpp"
#include "timelens/grid.hpp"
#include "timelens/units.hpp"

namespace timelens {

/// Fresnel (modulo-2π quadratic) time-lens drive description. The aperture is
/// bounded by the maximal instantaneous frequency f_max of the parabola:
/// half-duration δt = 2π·f_max/|K|, full duration Δt = 2δt.
struct FresnelLensSpec {
  double chirp_rate = 0.0;        // K, rad/s²
  double f_max_hz = 35e9;         // time-lens aperture limit
  double wrap_modulus = two_pi;   // radians; +inf disables wrapping
  double amplitude_scale = 1.0;   // multiplier on the wrapped phase

  double half_duration() const { return two_pi * f_max_hz / std::abs(chirp_rate); }
};

/// Arbitrary waveform generator model: sample rate plus an effective-bits
/// quantizer with 2^round(enob) uniform levels over full_scale.
struct AWGModel {
  double sample_rate = 92.16e9;  // samples/s
  double enob = 5.0;             // effective number of bits (real-valued)
  double full_scale = 0.0;       // quantizer span; <= 0 fits the waveform
};

/// Complex frequency response H(f) of the RF chain. Parametric form is a
/// zero-phase 4th-order Bessel low-pass magnitude; tabulated form interpolates
/// (frequency, magnitude dB, phase deg) rows linearly with flat extrapolation
/// and Hermitian symmetry for negative frequencies.
struct RFResponse {
  enum class Kind { parametric_lowpass, tabulated };

  struct Row {
    double f_hz;
    double mag_db;
    double phase_deg;
  };

  Kind kind = Kind::parametric_lowpass;
  double f_3db_hz = 35e9;
  double band_limit_hz = 35e9;  // precompensation band edge
  std::vector<Row> table;

  static RFResponse bessel_lowpass(double f_3db_hz, double band_limit_hz = 0.0) {
    RFResponse r;
    r.kind = Kind::parametric_lowpass;
    r.f_3db_hz = f_3db_hz;
    r.band_limit_hz = band_limit_hz > 0.0 ? band_limit_hz : f_3db_hz;
    return r;
  }

  static RFResponse from_table(std::vector<Row> rows, double band_limit_hz = 0.0) {
    if (rows.empty())
      throw std::invalid_argument("RFResponse: empty response table");
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (!(rows[i].f_hz > rows[i - 1].f_hz))
        throw std::invalid_argument(
            "RFResponse: table frequencies must be strictly increasing");
    for (const auto& row : rows)
      if (!std::isfinite(row.mag_db) || !std::isfinite(row.phase_deg))
        throw std::invalid_argument("RFResponse: non-finite table entry");
    RFResponse r;
    r.kind = Kind::tabulated;
    r.band_limit_hz = band_limit_hz > 0.0 ? band_limit_hz : rows.back().f_hz;
    r.table = std::move(rows);
    return r;
  }

  std::complex<double> value(double f_hz) const {
    const double af = std::abs(f_hz);
    if (kind == Kind::parametric_lowpass) return bessel4_magnitude(af / f_3db_hz);
    double mag_db, phase_deg;
    interpolate(af, mag_db, phase_deg);
    double phase = phase_deg * pi / 180.0;
    if (f_hz < 0.0) phase = -phase;
    return std::polar(amplitude_from_db(mag_db), phase);
  }

 private:
  // |H| of the normalized 4th-order Bessel low-pass,
  // H(s) = 105/(s⁴+10s³+45s²+105s+105), frequency scaled so |H| = 1/√2 at x=1.
  static double bessel4_magnitude(double x) {
    static const double w3db = [] {
      // |D(jw)|² = u⁴+10u³+135u²+1575u+11025 with u = w²; solve = 2·105².
      auto p = [](double u) {
        return ((u + 10.0) * u + 135.0) * u * u + 1575.0 * u + 11025.0 - 22050.0;
      };
      double lo = 4.0, hi = 5.0;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (p(mid) > 0.0 ? hi : lo) = mid;
      }
      return std::sqrt(0.5 * (lo + hi));
    }();
    const double u = (x * w3db) * (x * w3db);
    const double d2 = ((u + 10.0) * u + 135.0) * u * u + 1575.0 * u + 11025.0;
    return 105.0 / std::sqrt(d2);
  }

  void interpolate(double f_hz, double& mag_db, double& phase_deg) const {
    if (f_hz <= table.front().f_hz) {
      mag_db = table.front().mag_db;
      phase_deg = table.front().phase_deg;
      return;
    }
    if (f_hz >= table.back().f_hz) {
      mag_db = table.back().mag_db;
      phase_deg = table.back().phase_deg;
      return;
    }
    auto it = std::upper_bound(
        table.begin(), table.end(), f_hz,
        [](double f, const Row& row) { return f < row.f_hz; });
    const Row& hi = *it;
    const Row& lo = *(it - 1);
    const double w = (f_hz - lo.f_hz) / (hi.f_hz - lo.f_hz);
    mag_db = lo.mag_db + w * (hi.mag_db - lo.mag_db);
    phase_deg = lo.phase_deg + w * (hi.phase_deg - lo.phase_deg);
  }
};

/// Parse a tabulated response file: three numeric columns
/// "frequency_hz, magnitude_db, phase_deg" (comma or whitespace separated),
/// '#' comment lines, strictly increasing frequency.
inline RFResponse load_response_file(const std::string& path,
                                     double band_limit_hz = 0.0) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open response file: " + path);
  std::vector<RFResponse::Row> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (auto& c : line)
      if (c == ',') c = ' ';
    std::istringstream ss(line);
    RFResponse::Row row{};
    if (!(ss >> row.f_hz)) continue;  // blank or comment-only line
    if (!(ss >> row.mag_db >> row.phase_deg))
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected three numeric columns");
    rows.push_back(row);
  }
  return RFResponse::from_table(std::move(rows), band_limit_hz);
}

/// Real-valued phase-drive samples at the AWG rate. Sample k sits at
/// t_start + k/sample_rate.
struct DriveWaveform {
  double sample_rate = 92.16e9;
  std::vector<double> samples;
  double t_start = 0.0;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  double time_at(std::size_t k) const {
    return t_start + static_cast<double>(k) / sample_rate;
  }
};

/// Sample the Fresnel waveform scale·wrap(K·t²/2, modulus) over |t| ≤ δt at
/// the AWG rate, zero outside, with a fixed 1.5 ns zero-padded margin on each
/// side for filter ringing and interpolation.
inline DriveWaveform synthesize_fresnel(const FresnelLensSpec& spec,
                                        const AWGModel& awg) {
  if (spec.chirp_rate == 0.0)
    throw std::invalid_argument("synthesize_fresnel: chirp rate must be nonzero");
  if (!(spec.f_max_hz > 0.0) || !(spec.wrap_modulus > 0.0))
    throw std::invalid_argument("synthesize_fresnel: f_max and wrap modulus must be positive");
  if (spec.f_max_hz > 0.5 * awg.sample_rate)
    throw std::invalid_argument(
        "synthesize_fresnel: f_max exceeds the AWG Nyquist frequency");

  const double dt = 1.0 / awg.sample_rate;
  const double half = spec.half_duration();
  const std::int64_t pad = static_cast<std::int64_t>(std::ceil(1.5e-9 / dt));
  const std::int64_t m = static_cast<std::int64_t>(std::ceil(half / dt)) + pad;

  DriveWaveform w;
  w.sample_rate = awg.sample_rate;
  w.t_start = -static_cast<double>(m) * dt;
  w.samples.resize(static_cast<std::size_t>(2 * m + 1), 0.0);
  for (std::int64_t k = -m; k <= m; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (std::abs(t) > half) continue;
    const double parabola = 0.5 * spec.chirp_rate * t * t;
    w.samples[static_cast<std::size_t>(k + m)] =
        spec.amplitude_scale * wrap_phase(parabola, spec.wrap_modulus);
  }
  return w;
}

/// Zero the waveform outside |t| <= 2π·min(f_cut, f_max)/|K|, the aperture
/// where the parabola's instantaneous frequency stays below f_cut.
inline DriveWaveform clip_aperture(const DriveWaveform& w,
                                   const FresnelLensSpec& spec, double f_cut_hz) {
  if (!(f_cut_hz > 0.0))
    throw std::invalid_argument("clip_aperture: f_cut must be positive");
  const double half =
      two_pi * std::min(f_cut_hz, spec.f_max_hz) / std::abs(spec.chirp_rate);
  DriveWaveform out = w;
  for (std::size_t k = 0; k < out.samples.size(); ++k)
    if (std::abs(out.time_at(k)) > half) out.samples[k] = 0.0;
  return out;
}

struct QuantizeResult {
  DriveWaveform waveform;
  std::int64_t clipped_samples = 0;
};

/// Round each sample to the nearest of 2^round(enob) uniform levels spanning
/// full_scale (waveform range when full_scale is unset). Samples outside an
/// explicit full_scale clip to the end levels; clipping is reported, not an
/// error. Idempotent.
inline QuantizeResult quantize(const DriveWaveform& w, const AWGModel& awg) {
  if (!(awg.enob > 0.0))
    throw std::invalid_argument("quantize: enob must be positive");
  QuantizeResult result{w, 0};
  if (w.samples.empty()) return result;

  auto [min_it, max_it] = std::minmax_element(w.samples.begin(), w.samples.end());
  double lo = *min_it, hi = *max_it;
  if (awg.full_scale > 0.0) {
    const double mid = 0.5 * (lo + hi);
    lo = mid - 0.5 * awg.full_scale;
    hi = mid + 0.5 * awg.full_scale;
  }
  if (!(hi > lo)) return result;  // constant waveform

  const double levels = std::exp2(static_cast<double>(std::llround(awg.enob)));
  const double step = (hi - lo) / (levels - 1.0);
  for (auto& s : result.waveform.samples) {
    double x = s;
    if (x < lo) {
      x = lo;
      ++result.clipped_samples;
    } else if (x > hi) {
      x = hi;
      ++result.clipped_samples;
    }
    s = lo + std::round((x - lo) / step) * step;
  }
  return result;
}

struct PrecompensateResult {
  DriveWaveform waveform;
  std::int64_t floor_hits = 0;     // regularization floor events
  double imag_residue = 0.0;       // max |imag| left after the inverse FFT
};

struct ResponseResult {
  DriveWaveform waveform;
  double imag_residue = 0.0;
};

namespace detail {

// FFT-domain map over a real waveform: op(bin frequency, spectrum bin).
template <typename Op>
double spectral_map(DriveWaveform& w, Op&& op) {
  const std::size_t n = w.samples.size();
  std::vector<std::complex<double>> x(n), y(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = w.samples[k];
  fft_execute(x.data(), y.data(), n, fft_forward);
  const double df = w.sample_rate / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double f = (k <= n / 2) ? df * static_cast<double>(k)
                                  : df * (static_cast<double>(k) - static_cast<double>(n));
    op(f, y[k]);
  }
  fft_execute(y.data(), x.data(), n, fft_backward);
  double residue = 0.0;
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    w.samples[k] = x[k].real() * scale;
    residue = std::max(residue, std::abs(x[k].imag()) * scale);
  }
  return residue;
}

}  // namespace detail

/// Divide the waveform spectrum by H(f) for |f| ≤ band_limit, leaving
/// out-of-band content untouched. |H| is floored at max(|H|)·1e-3 inside the
/// band before division; floor events are reported as warnings, not errors.
inline PrecompensateResult precompensate(const DriveWaveform& w,
                                         const RFResponse& h) {
  PrecompensateResult result{w, 0, 0.0};
  if (w.samples.empty()) return result;

  const double band = h.band_limit_hz;
  const std::size_t n = w.samples.size();
  const double df = w.sample_rate / static_cast<double>(n);
  double max_mag = 0.0;
  for (double f = 0.0; f <= band; f += df)
    max_mag = std::max(max_mag, std::abs(h.value(f)));
  if (!(max_mag > 0.0))
    throw std::invalid_argument("precompensate: response vanishes inside the band");
  const double floor = max_mag * 1e-3;

  result.imag_residue = detail::spectral_map(
      result.waveform, [&](double f, std::complex<double>& bin) {
        if (std::abs(f) > band) return;
        std::complex<double> hf = h.value(f);
        const double mag = std::abs(hf);
        if (mag < floor) {
          hf = (mag > 0.0) ? hf * (floor / mag) : std::complex<double>(floor, 0.0);
          ++result.floor_hits;
        }
        bin /= hf;
      });
  return result;
}

/// Multiply the waveform spectrum by H(f) (all frequencies).
inline ResponseResult apply_response(const DriveWaveform& w, const RFResponse& h) {
  ResponseResult result{w, 0.0};
  if (w.samples.empty()) return result;
  result.imag_residue = detail::spectral_map(
      result.waveform,
      [&](double f, std::complex<double>& bin) { bin *= h.value(f); });
  return result;
}

/// Band-limited interpolation of the waveform onto an optical grid, shifted by
/// delay; zero outside the waveform support. The waveform (after delay) must
/// fit inside the grid span. Implemented as 64× FFT zero-pad upsampling
/// followed by Catmull-Rom interpolation.
inline std::vector<double> resample_to_grid(const DriveWaveform& w,
                                            const TemporalGrid& grid,
                                            double delay_s = 0.0) {
  std::vector<double> phase(static_cast<std::size_t>(grid.n_samples), 0.0);
  const std::size_t n = w.samples.size();
  if (n == 0) return phase;

  const double t0 = w.t_start + delay_s;
  const double t_end = t0 + static_cast<double>(n - 1) / w.sample_rate;
  if (t0 < grid.time_at(0) || t_end > grid.time_at(grid.n_samples - 1))
    throw std::invalid_argument("resample_to_grid: waveform support exceeds grid");

  constexpr std::size_t upsample = 64;
  const std::size_t nu = n * upsample;
  std::vector<std::complex<double>> x(n), spec(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = w.samples[k];
  detail::fft_execute(x.data(), spec.data(), n, detail::fft_forward);

  std::vector<std::complex<double>> padded(nu, 0.0);
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k <= half; ++k) padded[k] = spec[k];
  for (std::size_t k = half + 1; k < n; ++k) padded[nu - (n - k)] = spec[k];
  if (n % 2 == 0) {
    padded[half] = 0.5 * spec[half];  // split the Nyquist bin symmetrically
    padded[nu - half] = 0.5 * spec[half];
  }

  std::vector<std::complex<double>> up(nu);
  detail::fft_execute(padded.data(), up.data(), nu, detail::fft_backward);
  std::vector<double> fine(nu);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < nu; ++m) fine[m] = up[m].real() * scale;

  const double fine_rate = w.sample_rate * static_cast<double>(upsample);
  const auto at = [&](std::int64_t i) {
    // FFT upsampling is periodic; modular indexing matches it exactly.
    const std::int64_t nn = static_cast<std::int64_t>(nu);
    return fine[static_cast<std::size_t>(((i % nn) + nn) % nn)];
  };
  const double p_max = static_cast<double>(n - 1) * upsample;
  for (std::int64_t j = 0; j < grid.n_samples; ++j) {
    const double p = (grid.time_at(j) - t0) * fine_rate;
    if (p < 0.0 || p > p_max) continue;
    const std::int64_t i = static_cast<std::int64_t>(std::floor(p));
    const double f = p - static_cast<double>(i);
    const double a = at(i - 1), b = at(i), c = at(i + 1), d = at(i + 2);
    phase[static_cast<std::size_t>(j)] =
        b + 0.5 * f * (c - a + f * (2.0 * a - 5.0 * b + 4.0 * c - d +
                                    f * (3.0 * (b - c) + d - a)));
  }
  return phase;
}

}  // namespace timelens
