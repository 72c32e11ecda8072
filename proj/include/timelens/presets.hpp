#pragma once

#include <string>
#include <vector>

#include "timelens/config.hpp"
#include "timelens/errors.hpp"

namespace timelens {

/// Named experiment presets. The default chain everywhere: 92.16 GS/s AWG,
/// ENOB 5, 4th-order Bessel response with 35 GHz bandwidth, precompensation
/// inside the 35 GHz band, amplitude scale 1.
inline ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;  // library defaults = 10 ns/nm chain on 2^21 / 32 ns

  if (name == "fig3a") {
    // 10 ns/nm, pulse-picked to 20 MHz. 2^22 samples over 64 ns so the
    // 15.6 MHz spectral resolution resolves both the 168 MHz line and the
    // 20 MHz longitudinal-mode comb.
    cfg.grid_n = std::int64_t{1} << 22;
    cfg.grid_dt = 64e-9 / static_cast<double>(cfg.grid_n);
    cfg.dispersion_ns_per_nm = 10.0;
    cfg.rep_rate_hz = 20e6;
    cfg.system_transmission = 0.319;
    cfg.cfbg_modules = 1;
  } else if (name == "fig3b") {
    // 15 ns/nm (5 + 10 cascade), full 80 MHz repetition rate.
    cfg.grid_n = std::int64_t{1} << 22;
    cfg.grid_dt = 64e-9 / static_cast<double>(cfg.grid_n);
    cfg.dispersion_ns_per_nm = 15.0;
    cfg.rep_rate_hz = 80e6;
    cfg.system_transmission = 0.16;
    cfg.cfbg_modules = 2;
  } else if (name == "fig4") {
    // Aperture sweep, enhancement only; 2^20 over 32 ns is plenty.
    cfg.grid_n = std::int64_t{1} << 20;
    cfg.grid_dt = 32e-9 / static_cast<double>(cfg.grid_n);
    cfg.dispersion_ns_per_nm = 10.0;
    cfg.rep_rate_hz = 20e6;
    cfg.aperture_min_hz = 5e9;
    cfg.aperture_max_hz = 52.5e9;
    cfg.aperture_step_hz = 2.5e9;
    cfg.aperture_dispersions = {5.0, 10.0, 15.0};
  } else if (name == "fig5") {
    // Heralded single photons filtered to 1 nm, 10 ns/nm chain, 420 MHz
    // Fabry-Pérot absorber stand-in swept over ±3 GHz.
    cfg.grid_n = std::int64_t{1} << 22;
    cfg.grid_dt = 64e-9 / static_cast<double>(cfg.grid_n);
    cfg.dispersion_ns_per_nm = 10.0;
    cfg.rep_rate_hz = 80e6;
    cfg.source_fwhm_hz = bandwidth_to_frequency(1e-9, cfg.carrier_wavelength_m);
    cfg.system_transmission = 0.319;
    cfg.scan_min_hz = -3e9;
    cfg.scan_max_hz = 3e9;
    cfg.scan_points = 41;
  } else if (name == "smoke") {
    // Small, fast variant of fig3a for CI and CLI smoke tests.
    cfg.grid_n = std::int64_t{1} << 16;
    cfg.grid_dt = 40e-9 / static_cast<double>(cfg.grid_n);
    cfg.dispersion_ns_per_nm = 10.0;
    cfg.rep_rate_hz = 80e6;
    cfg.system_transmission = 0.319;
    cfg.spectrum_window_hz = 0.0;
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  return cfg;
}

inline std::vector<std::string> preset_names() {
  return {"fig3a", "fig3b", "fig4", "fig5", "smoke"};
}

}  // namespace timelens
