// timelens: electro-optic Fresnel time-lens spectral compression simulator.
//
// Subcommands mirror the experiment: `compress` runs one pipeline and emits
// spectra + metrics, `sweep-aperture` and `sweep-amplitude` drive parameter
// scans, `absorber-scan` sweeps a Fabry-Pérot filter over both arms, and
// `waveform` exports the drive waveform at the AWG sample times.
//
// Data goes to files under --out; progress and warnings go to stderr. Exit
// codes: 0 success, 2 configuration error, 3 numerical failure.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "timelens/config.hpp"
#include "timelens/errors.hpp"
#include "timelens/pipeline.hpp"
#include "timelens/presets.hpp"
#include "timelens/report.hpp"

namespace fs = std::filesystem;
using namespace timelens;

namespace {

struct CommonOptions {
  std::string config_file;
  std::string preset_name;
  std::string out_dir = ".";
  std::string format = "both";
  int workers = 1;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_file, "flat key=value config file");
  cmd->add_option("--preset", opt.preset_name,
                  "named preset: fig3a, fig3b, fig4, fig5, smoke");
  cmd->add_option("--out", opt.out_dir, "output directory (default: .)");
  cmd->add_option("--format", opt.format, "csv | json | both (default: both)")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  cmd->add_option("--workers", opt.workers, "worker threads for sweeps")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--set", opt.overrides,
                  "override a single key, e.g. --set lens.f_max=30GHz");
}

ExperimentConfig resolve_config(const CommonOptions& opt) {
  ExperimentConfig cfg =
      opt.preset_name.empty() ? ExperimentConfig{} : preset(opt.preset_name);
  if (!opt.config_file.empty()) load_config_file(cfg, opt.config_file);
  for (const auto& kv : opt.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_setting(cfg, detail::trim(kv.substr(0, eq)),
                  detail::trim(kv.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

fs::path ensure_out_dir(const CommonOptions& opt) {
  fs::path dir(opt.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir.string());
  return dir;
}

bool wants_csv(const CommonOptions& opt) { return opt.format != "json"; }
bool wants_json(const CommonOptions& opt) { return opt.format != "csv"; }

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int run_compress_cmd(const CommonOptions& opt) {
  const auto start = Clock::now();
  const ExperimentConfig cfg = resolve_config(opt);
  const fs::path dir = ensure_out_dir(opt);
  std::cerr << "compress: grid " << cfg.grid_n << " x " << cfg.grid_dt * 1e15
            << " fs, dispersion " << cfg.dispersion_ns_per_nm << " ns/nm\n";

  const CompressionResult run = run_compression(cfg);
  print_warnings(run.warnings);

  if (wants_csv(opt)) {
    export_spectra_csv(dir / "spectra.csv", run, cfg.carrier_wavelength_m,
                       cfg.spectrum_window_hz);
    if (run.comb) export_comb_csv(dir / "comb.csv", *run.comb);
  }
  if (wants_json(opt)) {
    ordered_json j = summary_header("compress", opt.preset_name, cfg, run.warnings);
    j["results"] = compression_to_json(run);
    write_summary(dir / "summary.json", std::move(j), seconds_since(start));
  }
  std::cerr << "enhancement " << run.metrics.enhancement << ", efficiency "
            << run.metrics.efficiency << ", fwhm " << run.metrics.fwhm_hz / 1e6
            << " MHz, compression factor " << run.metrics.compression_factor
            << "\n";
  return 0;
}

int run_aperture_cmd(const CommonOptions& opt) {
  const auto start = Clock::now();
  const ExperimentConfig cfg = resolve_config(opt);
  const fs::path dir = ensure_out_dir(opt);
  std::cerr << "sweep-aperture: " << cfg.aperture_dispersions.size()
            << " dispersions, cuts " << cfg.aperture_min_hz / 1e9 << " - "
            << cfg.aperture_max_hz / 1e9 << " GHz\n";

  const auto rows = run_aperture_sweep(cfg, opt.workers);
  if (wants_csv(opt)) export_aperture_csv(dir / "aperture_sweep.csv", rows);
  if (wants_json(opt)) {
    ordered_json j = summary_header("sweep-aperture", opt.preset_name, cfg, {});
    j["results"]["sweep"] = aperture_to_json(rows);
    write_summary(dir / "summary.json", std::move(j), seconds_since(start));
  }
  return 0;
}

int run_amplitude_cmd(const CommonOptions& opt) {
  const auto start = Clock::now();
  const ExperimentConfig cfg = resolve_config(opt);
  const fs::path dir = ensure_out_dir(opt);
  const auto scales = amplitude_sweep_scales(cfg);
  std::cerr << "sweep-amplitude: " << scales.size() << " scales in ["
            << cfg.amp_min << ", " << cfg.amp_max << "]\n";

  const auto sweep = run_amplitude_sweep(cfg, scales, opt.workers);
  if (wants_csv(opt)) export_amplitude_csv(dir / "amplitude_sweep.csv", sweep);
  if (wants_json(opt)) {
    ordered_json j = summary_header("sweep-amplitude", opt.preset_name, cfg, {});
    j["results"] = amplitude_to_json(sweep);
    write_summary(dir / "summary.json", std::move(j), seconds_since(start));
  }
  std::cerr << "best amplitude scale " << sweep.best_scale << " (enhancement "
            << sweep.best_enhancement << ")\n";
  return 0;
}

int run_absorber_cmd(const CommonOptions& opt) {
  const auto start = Clock::now();
  const ExperimentConfig cfg = resolve_config(opt);
  const fs::path dir = ensure_out_dir(opt);
  std::cerr << "absorber-scan: " << cfg.scan_points << " detunings, filter "
            << cfg.filter_fwhm_hz / 1e6 << " MHz FWHM\n";

  const auto scan = run_absorber_scan(cfg, opt.workers);
  print_warnings(scan.warnings);
  if (wants_csv(opt)) export_absorber_csv(dir / "absorber_scan.csv", scan);
  if (wants_json(opt)) {
    ordered_json j =
        summary_header("absorber-scan", opt.preset_name, cfg, scan.warnings);
    j["results"] = absorber_to_json(scan);
    write_summary(dir / "summary.json", std::move(j), seconds_since(start));
  }
  std::cerr << "zero-detuning flux ratio " << scan.zero_detuning_ratio
            << ", deconvolved width " << scan.voigt.gaussian_fwhm_hz / 1e6
            << " MHz\n";
  return 0;
}

int run_waveform_cmd(const CommonOptions& opt) {
  const auto start = Clock::now();
  const ExperimentConfig cfg = resolve_config(opt);
  const fs::path dir = ensure_out_dir(opt);

  const WaveformReport report = waveform_report(cfg);
  print_warnings(report.warnings);
  if (wants_csv(opt)) export_waveform_csv(dir / "waveform.csv", report);
  if (wants_json(opt)) {
    ordered_json j = summary_header("waveform", opt.preset_name, cfg, report.warnings);
    j["results"]["samples"] = report.time_s.size();
    write_summary(dir / "summary.json", std::move(j), seconds_since(start));
  }
  std::cerr << "waveform: " << report.time_s.size() << " AWG samples\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fresnel time-lens spectral compression simulator"};
  app.require_subcommand(1);

  CommonOptions compress_opt, aperture_opt, amplitude_opt, absorber_opt, wave_opt;
  add_common(app.add_subcommand("compress", "one compression run"), compress_opt);
  add_common(app.add_subcommand("sweep-aperture", "enhancement vs time-lens aperture"),
             aperture_opt);
  add_common(app.add_subcommand("sweep-amplitude", "enhancement vs RF amplitude scale"),
             amplitude_opt);
  add_common(app.add_subcommand("absorber-scan",
                                "Fabry-Perot scan of compressed and reference arms"),
             absorber_opt);
  add_common(app.add_subcommand("waveform", "export the RF drive waveform"), wave_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("compress")) return run_compress_cmd(compress_opt);
    if (app.got_subcommand("sweep-aperture")) return run_aperture_cmd(aperture_opt);
    if (app.got_subcommand("sweep-amplitude")) return run_amplitude_cmd(amplitude_opt);
    if (app.got_subcommand("absorber-scan")) return run_absorber_cmd(absorber_opt);
    if (app.got_subcommand("waveform")) return run_waveform_cmd(wave_opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure at stage '" << e.stage() << "': " << e.what()
              << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
