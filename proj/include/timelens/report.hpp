#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "timelens/analysis.hpp"
#include "timelens/config.hpp"
#include "timelens/errors.hpp"
#include "timelens/pipeline.hpp"

namespace timelens {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file: " + path.string());
  return out;
}

}  // namespace detail

inline ordered_json metrics_to_json(const SpectralMetrics& m) {
  ordered_json j;
  j["enhancement"] = m.enhancement;
  j["efficiency"] = m.efficiency;
  j["fwhm_hz"] = m.fwhm_hz;
  j["fwhm_pm"] = m.fwhm_pm;
  j["compression_factor"] = m.compression_factor;
  j["input_fwhm_hz"] = m.input_fwhm_hz;
  j["includes_loss"] = m.includes_loss;
  return j;
}

inline ordered_json fit_to_json(const GaussianFitResult& f) {
  ordered_json j;
  j["center_hz"] = f.center_hz;
  j["fwhm_hz"] = f.fwhm_hz;
  j["peak"] = f.peak;
  j["residual_rms"] = f.residual_rms;
  return j;
}

inline ordered_json voigt_to_json(const VoigtFitResult& f) {
  ordered_json j;
  j["gaussian_fwhm_hz"] = f.gaussian_fwhm_hz;
  j["lorentzian_fwhm_hz"] = f.lorentzian_fwhm_hz;
  j["center_hz"] = f.center_hz;
  j["peak"] = f.peak;
  j["residual_rms"] = f.residual_rms;
  return j;
}

inline ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  for (const auto& [k, v] : cfg.echo()) j[k] = v;
  return j;
}

inline ordered_json summary_header(const std::string& command,
                                   const std::string& preset_name,
                                   const ExperimentConfig& cfg,
                                   const std::vector<std::string>& warnings) {
  ordered_json j;
  j["command"] = command;
  j["preset"] = preset_name;
  j["config"] = config_to_json(cfg);
  j["warnings"] = warnings;
  return j;
}

/// Write a JSON document; the timing field is appended last so determinism
/// checks can strip it.
inline void write_summary(const std::filesystem::path& path, ordered_json j,
                          double timing_s) {
  j["timing_s"] = timing_s;
  auto out = detail::open_output(path);
  out << j.dump(2) << "\n";
}

/// CSV spectra export: detuning, wavelength offset at the carrier, input and
/// output intensity. The output column carries the chain loss when enabled.
/// window_hz > 0 crops to |detuning| <= window/2.
inline void export_spectra_csv(const std::filesystem::path& path,
                               const CompressionResult& run, double carrier_m,
                               double window_hz) {
  auto out = detail::open_output(path);
  out << "detuning_hz,wavelength_offset_pm,intensity_in,intensity_out\n";
  const auto& in = run.input_spectrum;
  const auto& outp = run.output_spectrum;
  for (std::int64_t k = 0; k < in.grid.n_samples; ++k) {
    const double f = in.freq_at(k);
    if (window_hz > 0.0 && std::abs(f) > 0.5 * window_hz) continue;
    const double dlam_pm = -bandwidth_to_wavelength(f, carrier_m) * 1e12;
    out << detail::csv_number(f) << ',' << detail::csv_number(dlam_pm) << ','
        << detail::csv_number(std::norm(in.samples[static_cast<std::size_t>(k)]))
        << ','
        << detail::csv_number(
               std::norm(outp.samples[static_cast<std::size_t>(k)]) *
               run.loss_scale)
        << '\n';
  }
}

inline void export_aperture_csv(const std::filesystem::path& path,
                                const std::vector<ApertureSweepRow>& rows) {
  auto out = detail::open_output(path);
  out << "dispersion_ns_per_nm,f_cut_hz,enhancement\n";
  for (const auto& row : rows)
    out << detail::csv_number(row.dispersion_ns_per_nm) << ','
        << detail::csv_number(row.f_cut_hz) << ','
        << detail::csv_number(row.enhancement) << '\n';
}

inline void export_amplitude_csv(const std::filesystem::path& path,
                                 const AmplitudeSweepResult& sweep) {
  auto out = detail::open_output(path);
  out << "amplitude_scale,enhancement\n";
  for (std::size_t i = 0; i < sweep.scales.size(); ++i)
    out << detail::csv_number(sweep.scales[i]) << ','
        << detail::csv_number(sweep.enhancements[i]) << '\n';
}

inline void export_absorber_csv(const std::filesystem::path& path,
                                const AbsorberScanResult& scan) {
  auto out = detail::open_output(path);
  out << "detuning_hz,flux_compressed,flux_reference\n";
  for (std::size_t i = 0; i < scan.detunings_hz.size(); ++i)
    out << detail::csv_number(scan.detunings_hz[i]) << ','
        << detail::csv_number(scan.flux_compressed[i]) << ','
        << detail::csv_number(scan.flux_reference[i]) << '\n';
}

inline void export_comb_csv(const std::filesystem::path& path,
                            const CombSpectrum& comb) {
  auto out = detail::open_output(path);
  out << "mode_frequency_hz,intensity\n";
  for (std::size_t i = 0; i < comb.mode_frequencies_hz.size(); ++i)
    out << detail::csv_number(comb.mode_frequencies_hz[i]) << ','
        << detail::csv_number(comb.intensities[i]) << '\n';
}

inline void export_waveform_csv(const std::filesystem::path& path,
                                const WaveformReport& report) {
  auto out = detail::open_output(path);
  out << "time_s,ideal_phase_rad,precompensated,post_chain\n";
  for (std::size_t i = 0; i < report.time_s.size(); ++i)
    out << detail::csv_number(report.time_s[i]) << ','
        << detail::csv_number(report.ideal_phase_rad[i]) << ','
        << detail::csv_number(report.precompensated[i]) << ','
        << detail::csv_number(report.post_chain[i]) << '\n';
}

inline ordered_json compression_to_json(const CompressionResult& run) {
  ordered_json j;
  j["metrics"] = metrics_to_json(run.metrics);
  j["fit"] = fit_to_json(run.fit);
  j["input_fit"] = fit_to_json(run.input_fit);
  j["loss_scale"] = run.loss_scale;
  if (run.comb) {
    ordered_json comb;
    comb["mode_spacing_hz"] = run.comb->mode_spacing_hz;
    comb["mode_frequencies_hz"] = run.comb->mode_frequencies_hz;
    comb["intensities"] = run.comb->intensities;
    j["comb"] = comb;
  }
  return j;
}

inline ordered_json aperture_to_json(const std::vector<ApertureSweepRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json r;
    r["dispersion_ns_per_nm"] = row.dispersion_ns_per_nm;
    r["f_cut_hz"] = row.f_cut_hz;
    r["enhancement"] = row.enhancement;
    arr.push_back(r);
  }
  return arr;
}

inline ordered_json amplitude_to_json(const AmplitudeSweepResult& sweep) {
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < sweep.scales.size(); ++i) {
    ordered_json r;
    r["amplitude_scale"] = sweep.scales[i];
    r["enhancement"] = sweep.enhancements[i];
    arr.push_back(r);
  }
  j["curve"] = arr;
  j["best_scale"] = sweep.best_scale;
  j["best_enhancement"] = sweep.best_enhancement;
  return j;
}

inline ordered_json absorber_to_json(const AbsorberScanResult& scan) {
  ordered_json j;
  j["zero_detuning_ratio"] = scan.zero_detuning_ratio;
  j["voigt"] = voigt_to_json(scan.voigt);
  j["detunings_hz"] = scan.detunings_hz;
  j["flux_compressed"] = scan.flux_compressed;
  j["flux_reference"] = scan.flux_reference;
  return j;
}

}  // namespace timelens
