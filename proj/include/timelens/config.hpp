#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "timelens/errors.hpp"
#include "timelens/grid.hpp"
#include "timelens/units.hpp"

namespace timelens {

/// Resolved experiment configuration. All quantities are SI; the config file
/// syntax accepts unit suffixes (GHz, nm, ps, GS/s, ...) that are converted on
/// load, wavelength widths at the carrier.
struct ExperimentConfig {
  // grid
  std::int64_t grid_n = std::int64_t{1} << 21;
  double grid_dt = 32e-9 / static_cast<double>(std::int64_t{1} << 21);

  // source
  double carrier_wavelength_m = 1560e-9;
  double source_fwhm_hz = 68.5e9;
  double source_energy = 1.0;
  double rep_rate_hz = 80e6;

  // dispersion
  double dispersion_ns_per_nm = 10.0;

  // time lens
  bool lens_enabled = true;
  double lens_f_max_hz = 35e9;
  double wrap_modulus = two_pi;
  double amplitude_scale = 1.0;
  double lens_delay_s = 0.0;
  double f_cut_hz = 0.0;  // extra aperture clip; 0 = off

  // RF chain
  enum class RfMode { modeled, ideal };
  RfMode rf_mode = RfMode::modeled;
  double rf_sample_rate = 92.16e9;
  double rf_enob = 5.0;
  bool rf_quantize = true;
  double rf_full_scale = 0.0;  // 0 = fit the waveform
  double rf_f3db_hz = 35e9;
  double rf_band_limit_hz = 0.0;  // 0 = response default
  std::string rf_response_file;

  // losses
  bool losses_include = false;
  double cfbg_transmission = 0.5;   // 3 dB per module
  int cfbg_modules = 1;
  double eopm_transmission = 0.575; // 2.4 dB
  double system_transmission = 0.0; // overrides element losses when set

  // Fabry-Pérot filter
  double filter_fwhm_hz = 420e6;
  double filter_fsr_hz = bandwidth_to_frequency(1.2e-9, 1560e-9);
  double filter_peak = 1.0;
  double filter_detuning_hz = 0.0;

  // absorber scan
  double scan_min_hz = -3e9;
  double scan_max_hz = 3e9;
  int scan_points = 41;

  // aperture sweep
  double aperture_min_hz = 5e9;
  double aperture_max_hz = 52.5e9;
  double aperture_step_hz = 2.5e9;
  std::vector<double> aperture_dispersions = {5.0, 10.0, 15.0};

  // amplitude sweep
  double amp_min = 0.7;
  double amp_max = 1.3;
  int amp_points = 21;

  // analysis / outputs
  double fit_window_hint_hz = 0.0;
  double comb_offset_hz = 0.0;
  double spectrum_window_hz = 200e9;  // exported spectra crop; 0 = full grid

  double carrier_hz() const { return wavelength_to_frequency(carrier_wavelength_m); }
  double gdd() const {
    return gdd_from_dispersion(dispersion_ns_per_nm, carrier_wavelength_m);
  }
  double chain_transmission() const {
    if (system_transmission > 0.0) return system_transmission;
    return std::pow(cfbg_transmission, cfbg_modules) * eopm_transmission;
  }

  void validate() const {
    const TemporalGrid grid = make_grid(grid_n, grid_dt);  // throws on bad grid
    const double nyquist = grid.nyquist();
    if (lens_enabled && !(nyquist > lens_f_max_hz))
      throw ConfigError("grid Nyquist must exceed the lens f_max");
    if (!(nyquist > 0.5 * source_fwhm_hz))
      throw ConfigError("grid Nyquist must exceed half the source bandwidth");
    if (!(source_fwhm_hz > 0.0) || !(source_energy >= 0.0) || !(rep_rate_hz > 0.0))
      throw ConfigError("source parameters must be positive");
    if (lens_enabled && lens_f_max_hz > 0.5 * rf_sample_rate)
      throw ConfigError("lens f_max must not exceed half the RF sample rate");
    if (!(wrap_modulus > 0.0))
      throw ConfigError("wrap modulus must be positive");
    if (!(rf_sample_rate > 0.0) || !(rf_enob > 0.0))
      throw ConfigError("RF sample rate and ENOB must be positive");
    if (!(filter_fwhm_hz > 0.0) || !(filter_fsr_hz > filter_fwhm_hz))
      throw ConfigError("filter FSR must exceed its FWHM");
    if (!(filter_peak > 0.0 && filter_peak <= 1.0))
      throw ConfigError("filter peak transmission must be in (0, 1]");
    for (double t : {cfbg_transmission, eopm_transmission})
      if (!(t > 0.0 && t <= 1.0))
        throw ConfigError("element transmissions must be in (0, 1]");
    if (system_transmission < 0.0 || system_transmission > 1.0)
      throw ConfigError("system transmission must be in [0, 1]");
    if (!rf_response_file.empty() && !std::filesystem::exists(rf_response_file))
      throw ConfigError("response file does not exist: " + rf_response_file);
    if (scan_points < 1 || amp_points < 1)
      throw ConfigError("scan point counts must be positive");
    if (!(aperture_min_hz > 0.0) || !(aperture_step_hz > 0.0) ||
        !(aperture_max_hz >= aperture_min_hz))
      throw ConfigError("invalid aperture sweep range");
  }

  /// Canonical key/value echo of every resolved setting (SI units).
  std::map<std::string, std::string> echo() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::string format_si(double v) {
  std::ostringstream ss;
  ss.precision(15);
  ss << v;
  return ss.str();
}

struct ParsedValue {
  double number = 0.0;
  std::string unit;  // empty for bare numbers
};

inline ParsedValue parse_number(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "inf" || text == "+inf")
    return {std::numeric_limits<double>::infinity(), ""};
  std::size_t pos = 0;
  double number = 0.0;
  try {
    number = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse value '" + raw + "'");
  }
  std::string unit = trim(text.substr(pos));
  return {number, unit};
}

inline double unit_multiplier_time(const std::string& u) {
  if (u == "s") return 1.0;
  if (u == "ms") return 1e-3;
  if (u == "us") return 1e-6;
  if (u == "ns") return 1e-9;
  if (u == "ps") return 1e-12;
  if (u == "fs") return 1e-15;
  return 0.0;
}

inline double unit_multiplier_freq(const std::string& u) {
  if (u == "Hz") return 1.0;
  if (u == "kHz") return 1e3;
  if (u == "MHz") return 1e6;
  if (u == "GHz") return 1e9;
  if (u == "THz") return 1e12;
  if (u == "S/s" || u == "Sa/s") return 1.0;
  if (u == "kS/s") return 1e3;
  if (u == "MS/s") return 1e6;
  if (u == "GS/s" || u == "GSa/s") return 1e9;
  return 0.0;
}

inline double unit_multiplier_length(const std::string& u) {
  if (u == "m") return 1.0;
  if (u == "mm") return 1e-3;
  if (u == "um") return 1e-6;
  if (u == "nm") return 1e-9;
  if (u == "pm") return 1e-12;
  return 0.0;
}

inline double to_time(const std::string& key, const std::string& raw) {
  auto v = parse_number(key, raw);
  if (v.unit.empty()) return v.number;
  const double m = unit_multiplier_time(v.unit);
  if (m == 0.0) throw ConfigError(key + ": expected a time unit, got '" + v.unit + "'");
  return v.number * m;
}

/// Frequency-valued key; wavelength units are converted at the carrier.
inline double to_frequency(const std::string& key, const std::string& raw,
                           double carrier_m) {
  auto v = parse_number(key, raw);
  if (v.unit.empty()) return v.number;
  if (double m = unit_multiplier_freq(v.unit); m != 0.0) return v.number * m;
  if (double m = unit_multiplier_length(v.unit); m != 0.0)
    return bandwidth_to_frequency(v.number * m, carrier_m);
  throw ConfigError(key + ": expected a frequency or wavelength unit, got '" +
                    v.unit + "'");
}

inline double to_length(const std::string& key, const std::string& raw) {
  auto v = parse_number(key, raw);
  if (v.unit.empty()) return v.number;
  const double m = unit_multiplier_length(v.unit);
  if (m == 0.0) throw ConfigError(key + ": expected a length unit, got '" + v.unit + "'");
  return v.number * m;
}

inline double to_scalar(const std::string& key, const std::string& raw) {
  auto v = parse_number(key, raw);
  if (!v.unit.empty() && v.unit != "rad")
    throw ConfigError(key + ": expected a bare number, got unit '" + v.unit + "'");
  return v.number;
}

inline std::int64_t to_integer(const std::string& key, const std::string& raw) {
  const double v = to_scalar(key, raw);
  const auto i = static_cast<std::int64_t>(std::llround(v));
  if (static_cast<double>(i) != v)
    throw ConfigError(key + ": expected an integer");
  return i;
}

inline bool to_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected a boolean");
}

inline std::vector<double> to_scalar_list(const std::string& key,
                                          const std::string& raw) {
  std::vector<double> values;
  std::string item;
  std::istringstream ss(raw);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    values.push_back(to_scalar(key, item));
  }
  if (values.empty()) throw ConfigError(key + ": empty list");
  return values;
}

}  // namespace detail

/// Apply one `key = value` setting. Unknown keys are errors (they are almost
/// always typos in physics parameters).
inline void apply_setting(ExperimentConfig& cfg, const std::string& key,
                          const std::string& value) {
  using namespace detail;
  const double carrier = cfg.carrier_wavelength_m;
  if (key == "grid.n_samples") {
    cfg.grid_n = to_integer(key, value);
  } else if (key == "grid.dt") {
    cfg.grid_dt = to_time(key, value);
  } else if (key == "grid.span") {
    cfg.grid_dt = to_time(key, value) / static_cast<double>(cfg.grid_n);
  } else if (key == "source.carrier_wavelength") {
    cfg.carrier_wavelength_m = to_length(key, value);
  } else if (key == "source.spectral_fwhm") {
    cfg.source_fwhm_hz = to_frequency(key, value, carrier);
  } else if (key == "source.energy") {
    cfg.source_energy = to_scalar(key, value);
  } else if (key == "source.rep_rate") {
    cfg.rep_rate_hz = to_frequency(key, value, carrier);
  } else if (key == "cfbg.dispersion_ns_per_nm") {
    cfg.dispersion_ns_per_nm = to_scalar(key, value);
  } else if (key == "lens.enabled") {
    cfg.lens_enabled = to_bool(key, value);
  } else if (key == "lens.f_max") {
    cfg.lens_f_max_hz = to_frequency(key, value, carrier);
  } else if (key == "lens.wrap_modulus") {
    cfg.wrap_modulus = to_scalar(key, value);
  } else if (key == "lens.amplitude_scale") {
    cfg.amplitude_scale = to_scalar(key, value);
  } else if (key == "lens.delay") {
    cfg.lens_delay_s = to_time(key, value);
  } else if (key == "lens.f_cut") {
    cfg.f_cut_hz = to_frequency(key, value, carrier);
  } else if (key == "rf.mode") {
    const std::string v = trim(value);
    if (v == "modeled") cfg.rf_mode = ExperimentConfig::RfMode::modeled;
    else if (v == "ideal") cfg.rf_mode = ExperimentConfig::RfMode::ideal;
    else throw ConfigError("rf.mode: expected 'modeled' or 'ideal'");
  } else if (key == "rf.sample_rate") {
    cfg.rf_sample_rate = to_frequency(key, value, carrier);
  } else if (key == "rf.enob") {
    cfg.rf_enob = to_scalar(key, value);
  } else if (key == "rf.quantize") {
    cfg.rf_quantize = to_bool(key, value);
  } else if (key == "rf.full_scale") {
    cfg.rf_full_scale = to_scalar(key, value);
  } else if (key == "rf.f_3db") {
    cfg.rf_f3db_hz = to_frequency(key, value, carrier);
  } else if (key == "rf.band_limit") {
    cfg.rf_band_limit_hz = to_frequency(key, value, carrier);
  } else if (key == "rf.response_file") {
    cfg.rf_response_file = trim(value);
  } else if (key == "losses.include") {
    cfg.losses_include = to_bool(key, value);
  } else if (key == "losses.cfbg_transmission") {
    cfg.cfbg_transmission = to_scalar(key, value);
  } else if (key == "losses.cfbg_modules") {
    cfg.cfbg_modules = static_cast<int>(to_integer(key, value));
  } else if (key == "losses.eopm_transmission") {
    cfg.eopm_transmission = to_scalar(key, value);
  } else if (key == "losses.system_transmission") {
    cfg.system_transmission = to_scalar(key, value);
  } else if (key == "filter.fwhm") {
    cfg.filter_fwhm_hz = to_frequency(key, value, carrier);
  } else if (key == "filter.fsr") {
    cfg.filter_fsr_hz = to_frequency(key, value, carrier);
  } else if (key == "filter.peak_transmission") {
    cfg.filter_peak = to_scalar(key, value);
  } else if (key == "filter.detuning") {
    cfg.filter_detuning_hz = to_frequency(key, value, carrier);
  } else if (key == "scan.min") {
    cfg.scan_min_hz = to_frequency(key, value, carrier);
  } else if (key == "scan.max") {
    cfg.scan_max_hz = to_frequency(key, value, carrier);
  } else if (key == "scan.points") {
    cfg.scan_points = static_cast<int>(to_integer(key, value));
  } else if (key == "aperture.min") {
    cfg.aperture_min_hz = to_frequency(key, value, carrier);
  } else if (key == "aperture.max") {
    cfg.aperture_max_hz = to_frequency(key, value, carrier);
  } else if (key == "aperture.step") {
    cfg.aperture_step_hz = to_frequency(key, value, carrier);
  } else if (key == "aperture.dispersions") {
    cfg.aperture_dispersions = to_scalar_list(key, value);
  } else if (key == "amplitude.min") {
    cfg.amp_min = to_scalar(key, value);
  } else if (key == "amplitude.max") {
    cfg.amp_max = to_scalar(key, value);
  } else if (key == "amplitude.points") {
    cfg.amp_points = static_cast<int>(to_integer(key, value));
  } else if (key == "fit.window_hint") {
    cfg.fit_window_hint_hz = to_frequency(key, value, carrier);
  } else if (key == "comb.offset") {
    cfg.comb_offset_hz = to_frequency(key, value, carrier);
  } else if (key == "outputs.spectrum_window") {
    cfg.spectrum_window_hz = to_frequency(key, value, carrier);
  } else {
    throw ConfigError("unknown configuration key: " + key);
  }
}

/// Read a flat `key = value` config file. '#' starts a comment; keys may not
/// repeat; the carrier wavelength (if present) is applied first so wavelength
/// widths elsewhere in the file convert consistently.
inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    for (const auto& [k, v] : entries)
      if (k == key)
        throw ConfigError(path + ": duplicate key '" + key + "'");
    entries.emplace_back(std::move(key), std::move(value));
  }
  for (const auto& [k, v] : entries)
    if (k == "source.carrier_wavelength") apply_setting(cfg, k, v);
  for (const auto& [k, v] : entries)
    if (k != "source.carrier_wavelength" && k != "grid.span")
      apply_setting(cfg, k, v);
  for (const auto& [k, v] : entries)  // span derives dt from the final n_samples
    if (k == "grid.span") apply_setting(cfg, k, v);
}

inline std::map<std::string, std::string> ExperimentConfig::echo() const {
  using detail::format_si;
  std::map<std::string, std::string> m;
  m["grid.n_samples"] = std::to_string(grid_n);
  m["grid.dt"] = format_si(grid_dt);
  m["source.carrier_wavelength"] = format_si(carrier_wavelength_m);
  m["source.spectral_fwhm"] = format_si(source_fwhm_hz);
  m["source.energy"] = format_si(source_energy);
  m["source.rep_rate"] = format_si(rep_rate_hz);
  m["cfbg.dispersion_ns_per_nm"] = format_si(dispersion_ns_per_nm);
  m["lens.enabled"] = lens_enabled ? "true" : "false";
  m["lens.f_max"] = format_si(lens_f_max_hz);
  m["lens.wrap_modulus"] = format_si(wrap_modulus);
  m["lens.amplitude_scale"] = format_si(amplitude_scale);
  m["lens.delay"] = format_si(lens_delay_s);
  m["lens.f_cut"] = format_si(f_cut_hz);
  m["rf.mode"] = rf_mode == RfMode::modeled ? "modeled" : "ideal";
  m["rf.sample_rate"] = format_si(rf_sample_rate);
  m["rf.enob"] = format_si(rf_enob);
  m["rf.quantize"] = rf_quantize ? "true" : "false";
  m["rf.full_scale"] = format_si(rf_full_scale);
  m["rf.f_3db"] = format_si(rf_f3db_hz);
  m["rf.band_limit"] = format_si(rf_band_limit_hz);
  m["rf.response_file"] = rf_response_file;
  m["losses.include"] = losses_include ? "true" : "false";
  m["losses.cfbg_transmission"] = format_si(cfbg_transmission);
  m["losses.cfbg_modules"] = std::to_string(cfbg_modules);
  m["losses.eopm_transmission"] = format_si(eopm_transmission);
  m["losses.system_transmission"] = format_si(system_transmission);
  m["filter.fwhm"] = format_si(filter_fwhm_hz);
  m["filter.fsr"] = format_si(filter_fsr_hz);
  m["filter.peak_transmission"] = format_si(filter_peak);
  m["filter.detuning"] = format_si(filter_detuning_hz);
  m["scan.min"] = format_si(scan_min_hz);
  m["scan.max"] = format_si(scan_max_hz);
  m["scan.points"] = std::to_string(scan_points);
  m["aperture.min"] = format_si(aperture_min_hz);
  m["aperture.max"] = format_si(aperture_max_hz);
  m["aperture.step"] = format_si(aperture_step_hz);
  {
    std::string list;
    for (double d : aperture_dispersions) {
      if (!list.empty()) list += ",";
      list += format_si(d);
    }
    m["aperture.dispersions"] = list;
  }
  m["amplitude.min"] = format_si(amp_min);
  m["amplitude.max"] = format_si(amp_max);
  m["amplitude.points"] = std::to_string(amp_points);
  m["fit.window_hint"] = format_si(fit_window_hint_hz);
  m["comb.offset"] = format_si(comb_offset_hz);
  m["outputs.spectrum_window"] = format_si(spectrum_window_hz);
  return m;
}

}  // namespace timelens
