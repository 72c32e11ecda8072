#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "timelens/analysis.hpp"
#include "timelens/config.hpp"
#include "timelens/errors.hpp"
#include "timelens/photonics.hpp"
#include "timelens/rf.hpp"
#include "timelens/signal.hpp"

namespace timelens {

namespace detail {

/// Run fn(0..count-1) on up to `workers` threads. Each index produces its own
/// output slot, so results are independent of scheduling; the lowest-index
/// exception wins, for deterministic error reporting.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = 0;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error || i < error_index) {
          error = std::current_exception();
          error_index = i;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

struct DrivePhase {
  std::vector<double> phase;  // radians, one per optical grid point
  std::vector<std::string> warnings;
};

/// Build the temporal phase the EOPM applies, either through the modeled AWG
/// chain (sampling, precompensation, ENOB quantization, frequency response,
/// band-limited resampling) or as the ideal analytic Fresnel phase evaluated
/// directly on the optical grid.
inline DrivePhase build_drive_phase(const ExperimentConfig& cfg,
                                    const TemporalGrid& grid) {
  DrivePhase out;
  const double gdd = cfg.gdd();
  if (gdd == 0.0)
    throw NumericError("lens", "lens requires nonzero dispersion (K = 1/GDD)");
  const double chirp_rate = 1.0 / gdd;

  FresnelLensSpec lens{chirp_rate, cfg.lens_f_max_hz, cfg.wrap_modulus,
                       cfg.amplitude_scale};

  if (cfg.rf_mode == ExperimentConfig::RfMode::ideal) {
    const double half = cfg.f_cut_hz > 0.0
                            ? two_pi * std::min(cfg.f_cut_hz, cfg.lens_f_max_hz) /
                                  std::abs(chirp_rate)
                            : lens.half_duration();
    out.phase.resize(static_cast<std::size_t>(grid.n_samples), 0.0);
    for (std::int64_t j = 0; j < grid.n_samples; ++j) {
      const double t = grid.time_at(j) - cfg.lens_delay_s;
      if (std::abs(t) > half) continue;
      out.phase[static_cast<std::size_t>(j)] =
          cfg.amplitude_scale *
          wrap_phase(0.5 * chirp_rate * t * t, cfg.wrap_modulus);
    }
    return out;
  }

  AWGModel awg{cfg.rf_sample_rate, cfg.rf_enob, cfg.rf_full_scale};
  RFResponse response =
      cfg.rf_response_file.empty()
          ? RFResponse::bessel_lowpass(cfg.rf_f3db_hz, cfg.rf_band_limit_hz)
          : load_response_file(cfg.rf_response_file, cfg.rf_band_limit_hz);

  DriveWaveform w = synthesize_fresnel(lens, awg);
  if (cfg.f_cut_hz > 0.0) w = clip_aperture(w, lens, cfg.f_cut_hz);

  PrecompensateResult pre = precompensate(w, response);
  if (pre.floor_hits > 0)
    out.warnings.push_back("rf-chain: precompensation regularization floor hit on " +
                           std::to_string(pre.floor_hits) + " bins");
  w = std::move(pre.waveform);

  if (cfg.rf_quantize) {
    QuantizeResult q = quantize(w, awg);
    if (q.clipped_samples > 0)
      out.warnings.push_back("rf-chain: quantizer clipped " +
                             std::to_string(q.clipped_samples) + " samples");
    w = std::move(q.waveform);
  }

  w = apply_response(w, response).waveform;
  out.phase = resample_to_grid(w, grid, cfg.lens_delay_s);
  return out;
}

/// One full compression run. Spectra are kept lossless internally; the scalar
/// chain transmission (when enabled) multiplies the exported intensities and
/// the enhancement exactly, leaving fit-derived quantities untouched.
struct CompressionResult {
  SpectralAmplitude input_spectrum;   // lossless reference
  SpectralAmplitude output_spectrum;  // lossless; scale by loss_scale to export
  SpectralMetrics metrics;
  GaussianFitResult fit;
  GaussianFitResult input_fit;
  std::optional<CombSpectrum> comb;
  double loss_scale = 1.0;
  std::vector<std::string> warnings;
};

namespace detail {

struct SpectraPair {
  SpectralAmplitude input;
  SpectralAmplitude output;
  std::vector<std::string> warnings;
};

/// Shared pipeline core: source → CFBG chirp → time lens → output spectrum.
inline SpectraPair run_spectra(const ExperimentConfig& cfg) {
  cfg.validate();
  SpectraPair result;
  TemporalGrid grid = make_grid(cfg.grid_n, cfg.grid_dt);

  ComplexEnvelope env = [&] {
    try {
      GaussianPulseSource src{cfg.carrier_wavelength_m, cfg.source_fwhm_hz,
                              cfg.source_energy, cfg.rep_rate_hz};
      return generate_pulse(src, grid);
    } catch (const std::exception& e) {
      throw NumericError("source", e.what());
    }
  }();
  result.input = to_spectrum(env);

  const double gdd = cfg.gdd();
  bool touched = false;
  if (gdd != 0.0) {
    try {
      DispersiveElement cfbg{cfg.dispersion_ns_per_nm, cfg.carrier_wavelength_m, 1.0};
      env = apply_cfbg(env, cfbg);
      touched = true;
    } catch (const std::exception& e) {
      throw NumericError("cfbg", e.what());
    }
  }
  if (cfg.lens_enabled) {
    try {
      DrivePhase drive = build_drive_phase(cfg, grid);
      for (auto& warning : drive.warnings) result.warnings.push_back(warning);
      env = apply_temporal_phase(env, drive.phase);
      touched = true;
    } catch (const NumericError&) {
      throw;
    } catch (const std::exception& e) {
      throw NumericError("rf-chain", e.what());
    }
  }
  // With every stage inert the output IS the input, bit for bit.
  result.output = touched ? to_spectrum(env) : result.input;
  return result;
}

inline double enhancement_only(const ExperimentConfig& cfg) {
  const SpectraPair pair = run_spectra(cfg);
  return peak_enhancement(pair.input, pair.output);
}

}  // namespace detail

inline CompressionResult run_compression(const ExperimentConfig& cfg) {
  detail::SpectraPair pair = detail::run_spectra(cfg);

  CompressionResult result;
  result.warnings = std::move(pair.warnings);

  const double enhancement_lossless = peak_enhancement(pair.input, pair.output);
  try {
    result.input_fit = fit_gaussian_peak(pair.input);
    result.fit = fit_gaussian_peak(pair.output, cfg.fit_window_hint_hz);
    result.metrics.efficiency = efficiency(pair.output, result.fit);
  } catch (const std::exception& e) {
    throw NumericError("analysis", e.what());
  }

  result.loss_scale = cfg.losses_include ? cfg.chain_transmission() : 1.0;
  result.metrics.enhancement = enhancement_lossless * result.loss_scale;
  result.metrics.includes_loss = cfg.losses_include;
  result.metrics.fwhm_hz = result.fit.fwhm_hz;
  result.metrics.fwhm_pm =
      bandwidth_to_wavelength(result.fit.fwhm_hz, cfg.carrier_wavelength_m) * 1e12;
  result.metrics.input_fwhm_hz = result.input_fit.fwhm_hz;
  result.metrics.compression_factor = result.input_fit.fwhm_hz / result.fit.fwhm_hz;

  if (cfg.rep_rate_hz >= pair.output.df()) {
    result.comb = comb_sample(pair.output, cfg.rep_rate_hz, cfg.comb_offset_hz);
    if (result.loss_scale != 1.0)
      for (auto& v : result.comb->intensities) v *= result.loss_scale;
  } else {
    result.warnings.push_back(
        "analysis: comb sampling skipped (repetition rate below spectral resolution)");
  }

  result.input_spectrum = std::move(pair.input);
  result.output_spectrum = std::move(pair.output);
  return result;
}

struct ApertureSweepRow {
  double dispersion_ns_per_nm = 0.0;
  double f_cut_hz = 0.0;
  double enhancement = 0.0;
};

/// Lossless enhancement versus time-lens aperture (instantaneous-frequency
/// cut-off), for each configured dispersion. Rows are ordered by dispersion,
/// then f_cut, independent of the worker count.
inline std::vector<ApertureSweepRow> run_aperture_sweep(
    const ExperimentConfig& cfg, int workers = 1) {
  std::vector<double> cuts;
  for (double f = cfg.aperture_min_hz; f <= cfg.aperture_max_hz + 1e-6;
       f += cfg.aperture_step_hz)
    cuts.push_back(f);
  if (cuts.size() < 2)
    throw ConfigError("aperture sweep needs at least 2 cut frequencies");

  std::vector<ApertureSweepRow> rows(cuts.size() * cfg.aperture_dispersions.size());
  detail::parallel_for(rows.size(), workers, [&](std::size_t i) {
    const std::size_t d = i / cuts.size();
    const std::size_t c = i % cuts.size();
    ExperimentConfig run = cfg;
    run.dispersion_ns_per_nm = cfg.aperture_dispersions[d];
    run.f_cut_hz = cuts[c];
    run.losses_include = false;
    rows[i] = {run.dispersion_ns_per_nm, cuts[c], detail::enhancement_only(run)};
  });
  return rows;
}

struct AmplitudeSweepResult {
  std::vector<double> scales;
  std::vector<double> enhancements;
  double best_scale = 0.0;
  double best_enhancement = 0.0;
};

/// Sweep the RF amplitude scale and report the scale that maximizes the peak
/// spectral intensity, mirroring the experimental 2π calibration.
inline AmplitudeSweepResult run_amplitude_sweep(const ExperimentConfig& cfg,
                                                std::vector<double> scales,
                                                int workers = 1) {
  if (scales.empty()) throw ConfigError("amplitude sweep: empty scale list");
  AmplitudeSweepResult result;
  result.scales = std::move(scales);
  result.enhancements.resize(result.scales.size());
  detail::parallel_for(result.scales.size(), workers, [&](std::size_t i) {
    ExperimentConfig run = cfg;
    run.amplitude_scale = result.scales[i];
    run.losses_include = false;
    result.enhancements[i] = detail::enhancement_only(run);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.enhancements.size(); ++i)
    if (result.enhancements[i] > result.enhancements[best]) best = i;
  result.best_scale = result.scales[best];
  result.best_enhancement = result.enhancements[best];
  return result;
}

inline std::vector<double> amplitude_sweep_scales(const ExperimentConfig& cfg) {
  std::vector<double> scales;
  if (cfg.amp_points == 1) {
    scales.push_back(cfg.amp_min);
    return scales;
  }
  for (int i = 0; i < cfg.amp_points; ++i)
    scales.push_back(cfg.amp_min + (cfg.amp_max - cfg.amp_min) * i /
                                       static_cast<double>(cfg.amp_points - 1));
  return scales;
}

struct AbsorberScanResult {
  std::vector<double> detunings_hz;
  std::vector<double> flux_compressed;  // includes chain loss when enabled
  std::vector<double> flux_reference;   // direct connection, lossless
  double zero_detuning_ratio = 0.0;
  VoigtFitResult voigt;
  std::vector<std::string> warnings;
};

/// Fabry-Pérot absorber scan of the compressed and reference (lens off,
/// spectrally identical to the source) single-photon spectra, plus the Voigt
/// deconvolution of the compressed scan against the filter's Lorentzian width.
inline AbsorberScanResult run_absorber_scan(const ExperimentConfig& cfg,
                                            int workers = 1) {
  ExperimentConfig comp = cfg;
  comp.lens_enabled = true;
  detail::SpectraPair pair = detail::run_spectra(comp);

  AbsorberScanResult result;
  result.warnings = std::move(pair.warnings);
  const double loss = cfg.losses_include ? cfg.chain_transmission() : 1.0;

  result.detunings_hz.resize(static_cast<std::size_t>(cfg.scan_points));
  for (int i = 0; i < cfg.scan_points; ++i)
    result.detunings_hz[static_cast<std::size_t>(i)] =
        cfg.scan_points == 1
            ? cfg.scan_min_hz
            : cfg.scan_min_hz + (cfg.scan_max_hz - cfg.scan_min_hz) * i /
                                    static_cast<double>(cfg.scan_points - 1);

  FabryPerotFilter filter{cfg.filter_fwhm_hz, cfg.filter_fsr_hz, cfg.filter_peak,
                          cfg.filter_detuning_hz};
  result.flux_compressed.resize(result.detunings_hz.size());
  result.flux_reference.resize(result.detunings_hz.size());
  detail::parallel_for(result.detunings_hz.size(), workers, [&](std::size_t i) {
    FabryPerotFilter f = filter;
    f.detuning_hz = result.detunings_hz[i];
    result.flux_compressed[i] = transmitted_energy(pair.output, f) * loss;
    result.flux_reference[i] = transmitted_energy(pair.input, f);
  });

  // Ratio at the detuning closest to zero.
  std::size_t zero = 0;
  for (std::size_t i = 1; i < result.detunings_hz.size(); ++i)
    if (std::abs(result.detunings_hz[i]) < std::abs(result.detunings_hz[zero]))
      zero = i;
  if (!(result.flux_reference[zero] > 0.0))
    throw NumericError("absorber-scan", "zero reference flux at zero detuning");
  result.zero_detuning_ratio =
      result.flux_compressed[zero] / result.flux_reference[zero];

  try {
    result.voigt = voigt_fit_deconvolve(result.detunings_hz, result.flux_compressed,
                                        cfg.filter_fwhm_hz);
  } catch (const std::exception& e) {
    throw NumericError("absorber-scan", e.what());
  }
  return result;
}

struct WaveformReport {
  std::vector<double> time_s;
  std::vector<double> ideal_phase_rad;
  std::vector<double> precompensated;
  std::vector<double> post_chain;
  std::vector<std::string> warnings;
};

/// Side-by-side drive waveform comparison at the AWG sample times: the ideal
/// wrapped parabola, what the AWG plays (precompensated + quantized), and the
/// waveform after the whole RF chain.
inline WaveformReport waveform_report(const ExperimentConfig& cfg) {
  cfg.validate();
  const double gdd = cfg.gdd();
  if (gdd == 0.0) throw NumericError("waveform", "zero dispersion gives no lens");
  const double chirp_rate = 1.0 / gdd;
  FresnelLensSpec lens{chirp_rate, cfg.lens_f_max_hz, cfg.wrap_modulus,
                       cfg.amplitude_scale};
  AWGModel awg{cfg.rf_sample_rate, cfg.rf_enob, cfg.rf_full_scale};
  RFResponse response =
      cfg.rf_response_file.empty()
          ? RFResponse::bessel_lowpass(cfg.rf_f3db_hz, cfg.rf_band_limit_hz)
          : load_response_file(cfg.rf_response_file, cfg.rf_band_limit_hz);

  WaveformReport report;
  DriveWaveform ideal = synthesize_fresnel(lens, awg);
  if (cfg.f_cut_hz > 0.0) {
    const double half = two_pi * std::min(cfg.f_cut_hz, cfg.lens_f_max_hz) /
                        std::abs(chirp_rate);
    if (half < 1.0 / awg.sample_rate)
      throw NumericError("waveform", "aperture shorter than one AWG sample (empty waveform)");
    ideal = clip_aperture(ideal, lens, cfg.f_cut_hz);
  }

  PrecompensateResult pre = precompensate(ideal, response);
  if (pre.floor_hits > 0)
    report.warnings.push_back("rf-chain: precompensation regularization floor hit on " +
                              std::to_string(pre.floor_hits) + " bins");
  DriveWaveform played = pre.waveform;
  if (cfg.rf_quantize) {
    QuantizeResult q = quantize(played, awg);
    if (q.clipped_samples > 0)
      report.warnings.push_back("rf-chain: quantizer clipped " +
                                std::to_string(q.clipped_samples) + " samples");
    played = std::move(q.waveform);
  }
  DriveWaveform post = apply_response(played, response).waveform;

  report.time_s.resize(ideal.samples.size());
  for (std::size_t k = 0; k < ideal.samples.size(); ++k)
    report.time_s[k] = ideal.time_at(k);
  report.ideal_phase_rad = ideal.samples;
  report.precompensated = played.samples;
  report.post_chain = post.samples;
  return report;
}

}  // namespace timelens
