#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "timelens/analysis.hpp"
#include "timelens/photonics.hpp"
#include "timelens/signal.hpp"
#include "timelens/units.hpp"

using namespace timelens;

namespace {

double temporal_fwhm(const ComplexEnvelope& env) {
  std::vector<double> x(env.samples.size()), y(env.samples.size());
  for (std::size_t j = 0; j < env.samples.size(); ++j) {
    x[j] = env.grid.time_at(static_cast<std::int64_t>(j));
    y[j] = std::norm(env.samples[j]);
  }
  std::size_t peak = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] > y[peak]) peak = i;
  const double half = 0.5 * y[peak];
  double lo = x.front(), hi = x.back();
  for (std::size_t i = peak; i-- > 0;)
    if (y[i] < half) {
      lo = x[i] + (half - y[i]) / (y[i + 1] - y[i]) * (x[i + 1] - x[i]);
      break;
    }
  for (std::size_t i = peak + 1; i < y.size(); ++i)
    if (y[i] < half) {
      hi = x[i - 1] + (y[i - 1] - half) / (y[i - 1] - y[i]) * (x[i] - x[i - 1]);
      break;
    }
  return hi - lo;
}

}  // namespace

TEST_CASE("generate_pulse") {
  const auto grid = make_grid(std::int64_t{1} << 16, 4.8828e-13);  // 32 ns

  SECTION("68.5 GHz spectral FWHM gives a 6.44 ps pulse") {
    GaussianPulseSource src;
    src.spectral_fwhm_hz = 68.5e9;
    const auto env = generate_pulse(src, grid);
    CHECK(gaussian_tbp / 68.5e9 == Approx(6.44e-12).epsilon(5e-3));
    CHECK(temporal_fwhm(env) == Approx(6.44e-12).epsilon(1e-2));
  }

  SECTION("energy parameter is met exactly") {
    GaussianPulseSource src;
    src.spectral_fwhm_hz = 68.5e9;
    src.energy = 2.0;
    const auto env = generate_pulse(src, grid);
    CHECK(energy(env) == Approx(2.0).epsilon(1e-12));
  }

  SECTION("spectrum is real, positive and Gaussian") {
    GaussianPulseSource src;
    src.spectral_fwhm_hz = 68.5e9;
    const auto spec = to_spectrum(generate_pulse(src, grid));
    double max_imag = 0.0, peak = 0.0;
    for (const auto& a : spec.samples) {
      max_imag = std::max(max_imag, std::abs(a.imag()));
      peak = std::max(peak, std::abs(a));
    }
    CHECK(max_imag / peak < 1e-9);
    const auto fit = fit_gaussian_peak(spec);
    CHECK(fit.residual_rms < 1e-9);
    CHECK(fit.fwhm_hz == Approx(68.5e9).epsilon(1e-3));
  }

  SECTION("under-resolved grid throws") {
    GaussianPulseSource src;
    src.spectral_fwhm_hz = 68.5e9;  // 6.44 ps FWHM
    const auto coarse = make_grid(1 << 10, 2e-12);
    CHECK_THROWS_AS(generate_pulse(src, coarse), std::invalid_argument);
  }
}

TEST_CASE("dispersion to GDD conversion") {
  DispersiveElement d{10.0, 1560e-9, 1.0};
  // D*lambda^2/(2*pi*c) evaluated independently.
  const double expected = 10.0 * 1560e-9 * 1560e-9 / (two_pi * 299792458.0);
  CHECK(expected == Approx(1.292e-20).epsilon(1e-3));
  CHECK(d.gdd() == Approx(expected).epsilon(1e-15));

  // Round trip dispersion -> gdd -> dispersion.
  for (double disp : {5.0, 10.0, 15.0, -7.3}) {
    const double gdd = gdd_from_dispersion(disp, 1560e-9);
    CHECK(dispersion_from_gdd(gdd, 1560e-9) == Approx(disp).epsilon(1e-12));
  }
}

TEST_CASE("apply_cfbg") {
  const auto grid = make_grid(std::int64_t{1} << 17, 2.4414e-13);  // 32 ns
  GaussianPulseSource src;
  src.spectral_fwhm_hz = 68.5e9;
  const auto env = generate_pulse(src, grid);

  SECTION("chirped duration matches the analytic Gaussian formula") {
    DispersiveElement d{10.0, 1560e-9, 1.0};
    const auto chirped = apply_cfbg(env, d);
    const double fwhm_in = gaussian_tbp / src.spectral_fwhm_hz;
    const double tau = fwhm_in / (2.0 * std::sqrt(std::log(2.0)));
    const double expected =
        fwhm_in * std::sqrt(1.0 + std::pow(d.gdd() / (tau * tau), 2));
    CHECK(temporal_fwhm(chirped) == Approx(expected).epsilon(5e-3));
  }

  SECTION("energy scales by the power transmission") {
    DispersiveElement d{10.0, 1560e-9, 0.5};
    const auto out = apply_cfbg(env, d);
    CHECK(energy(out) == Approx(0.5 * energy(env)).epsilon(1e-12));
  }

  SECTION("5 + 10 ns/nm cascade equals 15 ns/nm") {
    // GDD values add exactly.
    CHECK(gdd_from_dispersion(5.0, 1560e-9) + gdd_from_dispersion(10.0, 1560e-9) ==
          Approx(gdd_from_dispersion(15.0, 1560e-9)).epsilon(1e-12));

    // On a grid whose accumulated quadratic phase stays small the full complex
    // fields agree to 1e-12; spectra magnitudes agree on any grid.
    const auto small = make_grid(1 << 14, 1e-12);
    GaussianPulseSource narrow;
    narrow.spectral_fwhm_hz = 50e9;
    const auto pulse = generate_pulse(narrow, small);
    const auto once = apply_cfbg(pulse, DispersiveElement{15.0, 1560e-9, 1.0});
    const auto twice = apply_cfbg(apply_cfbg(pulse, DispersiveElement{5.0, 1560e-9, 1.0}),
                                  DispersiveElement{10.0, 1560e-9, 1.0});
    double peak = 0.0, dev = 0.0;
    for (std::size_t j = 0; j < once.samples.size(); ++j) {
      peak = std::max(peak, std::abs(once.samples[j]));
      dev = std::max(dev, std::abs(once.samples[j] - twice.samples[j]));
    }
    CHECK(dev / peak < 1e-12);
  }

  SECTION("spectral intensity is untouched apart from the loss scalar") {
    DispersiveElement d{10.0, 1560e-9, 0.81};
    const auto spec_in = to_spectrum(env);
    const auto spec_out = to_spectrum(apply_cfbg(env, d));
    double max_rel = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < spec_in.samples.size(); ++k)
      peak = std::max(peak, std::norm(spec_in.samples[k]));
    for (std::size_t k = 0; k < spec_in.samples.size(); ++k)
      max_rel = std::max(max_rel,
                         std::abs(std::norm(spec_out.samples[k]) -
                                  0.81 * std::norm(spec_in.samples[k])) / peak);
    CHECK(max_rel < 1e-12);
  }

  SECTION("grid span guard") {
    const auto tight = make_grid(1 << 13, 2.4414e-13);  // 2 ns span
    GaussianPulseSource wide;
    wide.spectral_fwhm_hz = 68.5e9;
    const auto pulse = generate_pulse(wide, tight);
    DispersiveElement d{10.0, 1560e-9, 1.0};  // would chirp to ~5.6 ns
    CHECK_THROWS_AS(apply_cfbg(pulse, d), std::invalid_argument);
  }
}

TEST_CASE("time-to-frequency mapping of the ideal lens") {
  // With an exact unwrapped lens K = 1/GDD the output spectral intensity
  // maps the input temporal intensity under omega = t/GDD.
  const auto grid = make_grid(std::int64_t{1} << 17, 2.4414e-13);
  GaussianPulseSource src;
  src.spectral_fwhm_hz = 68.5e9;
  const auto env = generate_pulse(src, grid);
  DispersiveElement d{10.0, 1560e-9, 1.0};
  const auto chirped = apply_cfbg(env, d);

  const double k_rate = 1.0 / d.gdd();
  std::vector<double> lens(chirped.samples.size());
  for (std::size_t j = 0; j < lens.size(); ++j) {
    const double t = grid.time_at(static_cast<std::int64_t>(j));
    lens[j] = 0.5 * k_rate * t * t;
  }
  const auto out = to_spectrum(apply_temporal_phase(chirped, lens));

  // Normalized profiles: output intensity vs input temporal intensity at
  // t = GDD * omega, compared by RMS over the region above 1e-3 of peak.
  double peak_out = 0.0;
  for (const auto& a : out.samples) peak_out = std::max(peak_out, std::norm(a));
  const double tau = (gaussian_tbp / src.spectral_fwhm_hz) /
                     (2.0 * std::sqrt(std::log(2.0)));
  double rms = 0.0;
  std::size_t count = 0;
  for (std::int64_t k = 0; k < grid.n_samples; ++k) {
    const double i_out = std::norm(out.samples[static_cast<std::size_t>(k)]) / peak_out;
    if (i_out < 1e-3) continue;
    const double t = d.gdd() * two_pi * out.freq_at(k);
    const double i_in = std::exp(-t * t / (tau * tau));  // analytic input profile
    rms += (i_out - i_in) * (i_out - i_in);
    ++count;
  }
  rms = std::sqrt(rms / static_cast<double>(count));
  CHECK(rms < 0.02);
}

TEST_CASE("Fabry-Perot transmission") {
  FabryPerotFilter f;
  f.fwhm_hz = 420e6;
  f.fsr_hz = bandwidth_to_frequency(1.2e-9, 1560e-9);
  f.peak_transmission = 0.9;
  f.detuning_hz = 1e9;

  CHECK(f.fsr_hz == Approx(147.8e9).epsilon(1e-2));
  CHECK(f.finesse() == Approx(f.fsr_hz / 420e6));

  SECTION("resonance, half maximum, periodicity") {
    CHECK(fp_transmission(f, f.detuning_hz) == Approx(0.9));
    CHECK(fp_transmission(f, f.detuning_hz + 210e6) == Approx(0.45).epsilon(1e-3));
    CHECK(fp_transmission(f, f.detuning_hz - 210e6) == Approx(0.45).epsilon(1e-3));
    CHECK(fp_transmission(f, f.detuning_hz + f.fsr_hz) ==
          Approx(fp_transmission(f, f.detuning_hz)).epsilon(1e-12));
    CHECK(fp_transmission(f, f.detuning_hz + 0.37 * f.fsr_hz + f.fsr_hz) ==
          Approx(fp_transmission(f, f.detuning_hz + 0.37 * f.fsr_hz)).epsilon(1e-12));
  }

  SECTION("finesse must exceed 1") {
    FabryPerotFilter bad;
    bad.fwhm_hz = 1e9;
    bad.fsr_hz = 0.5e9;
    CHECK_THROWS_AS(fp_transmission(bad, 0.0), std::invalid_argument);
  }
}

TEST_CASE("apply_filter") {
  const auto grid = make_grid(std::int64_t{1} << 14, 1e-11);  // df ~ 6.1 MHz
  FabryPerotFilter f;
  f.fwhm_hz = 420e6;
  f.fsr_hz = 1e15;  // FSR >> everything: single Lorentzian line
  f.peak_transmission = 1.0;

  // Flat-top spectrum of unit energy and given width.
  auto flat_spectrum = [&](double width_hz) {
    SpectralAmplitude s{grid, std::vector<std::complex<double>>(grid.n_samples, 0.0), 0.0};
    std::size_t count = 0;
    for (std::int64_t k = 0; k < grid.n_samples; ++k)
      if (std::abs(s.freq_at(k)) <= 0.5 * width_hz) ++count;
    const double amp = std::sqrt(1.0 / (count * grid.df()));
    for (std::int64_t k = 0; k < grid.n_samples; ++k)
      if (std::abs(s.freq_at(k)) <= 0.5 * width_hz)
        s.samples[static_cast<std::size_t>(k)] = amp;
    return s;
  };

  SECTION("flat 1 GHz window: matches the quadrature oracle") {
    const auto s = flat_spectrum(1e9);
    // Oracle: mean Airy transmission over the occupied bins.
    double expected = 0.0;
    std::size_t count = 0;
    for (std::int64_t k = 0; k < grid.n_samples; ++k)
      if (std::abs(s.freq_at(k)) <= 0.5e9) {
        expected += fp_transmission(f, s.freq_at(k));
        ++count;
      }
    expected /= static_cast<double>(count);
    const auto filtered = apply_filter(s, f);
    CHECK(energy(filtered) == Approx(expected).epsilon(1e-9));
    CHECK(transmitted_energy(s, f) == Approx(expected).epsilon(1e-9));
    // The (pi/2)*fwhm/width rule overshoots here because the window clips the
    // Lorentzian tails: the exact fraction is ~0.49 for these parameters.
    CHECK(energy(filtered) == Approx(0.493).epsilon(0.02));
  }

  SECTION("wide flat window approaches the (pi/2)*fwhm/width law") {
    const auto s = flat_spectrum(20e9);
    const double law = 0.5 * pi * 420e6 / 20e9;
    CHECK(transmitted_energy(s, f) == Approx(law).epsilon(0.02));
  }

  SECTION("detuned far off resonance transmits < 1%") {
    const auto s = flat_spectrum(1e9);
    FabryPerotFilter detuned = f;
    detuned.detuning_hz = 30e9;  // >> 10 FWHM away
    CHECK(transmitted_energy(s, detuned) < 0.01);
  }

  SECTION("delta at resonance with unit peak transmits fully") {
    SpectralAmplitude s{grid, std::vector<std::complex<double>>(grid.n_samples, 0.0), 0.0};
    s.samples[static_cast<std::size_t>(grid.n_samples / 2)] =
        std::sqrt(1.0 / grid.df());
    CHECK(transmitted_energy(s, f) == Approx(1.0).epsilon(1e-12));
  }
}
