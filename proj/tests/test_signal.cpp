#include <catch2/catch.hpp>

#include <complex>
#include <random>
#include <vector>

#include "timelens/grid.hpp"
#include "timelens/photonics.hpp"
#include "timelens/signal.hpp"
#include "timelens/units.hpp"

using namespace timelens;

namespace {

ComplexEnvelope random_envelope(const TemporalGrid& grid, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ComplexEnvelope env{grid, std::vector<std::complex<double>>(grid.n_samples), 0.0};
  for (auto& a : env.samples) a = {dist(rng), dist(rng)};
  return env;
}

// Intensity FWHM by linear interpolation of the half-maximum crossings.
double measured_fwhm(const std::vector<double>& x, const std::vector<double>& y) {
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

double spectral_fwhm(const SpectralAmplitude& spec) {
  std::vector<double> x(spec.samples.size()), y(spec.samples.size());
  for (std::size_t k = 0; k < spec.samples.size(); ++k) {
    x[k] = spec.freq_at(static_cast<std::int64_t>(k));
    y[k] = std::norm(spec.samples[k]);
  }
  return measured_fwhm(x, y);
}

double temporal_fwhm(const ComplexEnvelope& env) {
  std::vector<double> x(env.samples.size()), y(env.samples.size());
  for (std::size_t j = 0; j < env.samples.size(); ++j) {
    x[j] = env.grid.time_at(static_cast<std::int64_t>(j));
    y[j] = std::norm(env.samples[j]);
  }
  return measured_fwhm(x, y);
}

}  // namespace

TEST_CASE("make_grid basics") {
  const auto grid = make_grid(8, 1.0);
  CHECK(grid.df() == Approx(0.125));
  CHECK(grid.time_at(0) == Approx(-4.0));
  CHECK(grid.time_at(7) == Approx(3.0));
  CHECK(grid.freq_at(4) == 0.0);

  const auto production = make_grid(std::int64_t{1} << 21, 1.526e-14);
  CHECK(production.span() == Approx(32e-9).epsilon(1e-3));
  CHECK(production.df() == Approx(31.25e6).epsilon(1e-3));

  CHECK_THROWS_AS(make_grid(6, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, -1.0), std::invalid_argument);
}

TEST_CASE("delta transforms to a flat magnitude spectrum") {
  const auto grid = make_grid(16, 0.5);
  ComplexEnvelope env{grid, std::vector<std::complex<double>>(16, 0.0), 0.0};
  env.samples[5] = {1.0, 0.0};
  const auto spec = to_spectrum(env);
  for (const auto& a : spec.samples)
    CHECK(std::abs(a) == Approx(std::abs(spec.samples[0])).epsilon(1e-12));
}

TEST_CASE("round trip to_spectrum -> to_envelope is the identity") {
  for (unsigned seed : {1u, 2u}) {
    for (std::int64_t n : {2, 16, 1024}) {
      const auto grid = make_grid(n, 0.37e-12);
      const auto env = random_envelope(grid, seed);
      const auto back = to_envelope(to_spectrum(env));
      double max_dev = 0.0;
      for (std::size_t j = 0; j < env.samples.size(); ++j)
        max_dev = std::max(max_dev, std::abs(back.samples[j] - env.samples[j]));
      CHECK(max_dev < 1e-12);
    }
  }
}

TEST_CASE("Parseval holds in physical measure") {
  for (unsigned seed : {3u, 4u}) {
    const auto grid = make_grid(4096, 2.3e-13);
    const auto env = random_envelope(grid, seed);
    const auto spec = to_spectrum(env);
    CHECK(energy(spec) == Approx(energy(env)).epsilon(1e-12));
  }
}

TEST_CASE("Gaussian time-bandwidth product") {
  // FWHM_t * FWHM_f = 2 ln2 / pi for a transform-limited Gaussian.
  const auto grid = make_grid(1 << 15, 1.0e-13);
  GaussianPulseSource src;
  src.spectral_fwhm_hz = 68.5e9;
  const auto env = generate_pulse(src, grid);
  CHECK(temporal_fwhm(env) == Approx(gaussian_tbp / 68.5e9).epsilon(2e-3));
  CHECK(spectral_fwhm(to_spectrum(env)) == Approx(68.5e9).epsilon(2e-3));
}

TEST_CASE("apply_spectral_phase") {
  const auto grid = make_grid(1 << 12, 1.0e-12);
  GaussianPulseSource src;
  src.spectral_fwhm_hz = 5e9;
  const auto env = generate_pulse(src, grid);
  const auto spec = to_spectrum(env);

  SECTION("zero phase is the identity") {
    const auto out = apply_spectral_phase(spec, [](double) { return 0.0; });
    for (std::size_t k = 0; k < spec.samples.size(); ++k)
      CHECK(std::abs(out.samples[k] - spec.samples[k]) < 1e-15);
  }

  SECTION("linear phase delays the envelope (shift theorem)") {
    const double delay = 64.0 * grid.dt;  // whole bins, exact circular shift
    const auto out =
        to_envelope(apply_spectral_phase(spec, [&](double w) { return delay * w; }));
    double max_dev = 0.0, peak = 0.0;
    for (std::int64_t j = 64; j < grid.n_samples; ++j) {
      peak = std::max(peak, std::abs(env.samples[static_cast<std::size_t>(j - 64)]));
      max_dev = std::max(
          max_dev, std::abs(out.samples[static_cast<std::size_t>(j)] -
                            env.samples[static_cast<std::size_t>(j - 64)]));
    }
    CHECK(max_dev / peak < 1e-12);
  }

  SECTION("energy preserved") {
    const auto out =
        apply_spectral_phase(spec, [](double w) { return 1e-22 * w * w; });
    CHECK(energy(out) == Approx(energy(spec)).epsilon(1e-12));
  }

  SECTION("non-finite phase throws") {
    CHECK_THROWS_AS(apply_spectral_phase(
                        spec, [](double) { return std::nan(""); }),
                    std::invalid_argument);
  }
}

TEST_CASE("Gaussian chirp duration follows the analytic formula") {
  const auto grid = make_grid(std::int64_t{1} << 18, 1.2207e-13);  // 32 ns span
  GaussianPulseSource src;
  src.spectral_fwhm_hz = 68.5e9;
  const auto env = generate_pulse(src, grid);

  const double gdd = 1.292e-20;
  const auto chirped = to_envelope(apply_spectral_phase(
      to_spectrum(env), [&](double w) { return 0.5 * gdd * w * w; }));

  // tau_out = tau_in * sqrt(1 + (GDD/tau_field^2)^2), field sigma convention.
  const double fwhm_in = gaussian_tbp / src.spectral_fwhm_hz;
  const double tau_field = fwhm_in / (2.0 * std::sqrt(std::log(2.0)));
  const double expected =
      fwhm_in * std::sqrt(1.0 + std::pow(gdd / (tau_field * tau_field), 2));
  CHECK(expected == Approx(5.6e-9).epsilon(0.01));  // sanity: lands near 5.6 ns
  CHECK(temporal_fwhm(chirped) == Approx(expected).epsilon(5e-3));
}

TEST_CASE("apply_temporal_phase") {
  const auto grid = make_grid(1 << 12, 1.0e-12);
  GaussianPulseSource src;
  src.spectral_fwhm_hz = 5e9;
  const auto env = generate_pulse(src, grid);

  SECTION("zero phase is the identity") {
    std::vector<double> phase(env.samples.size(), 0.0);
    const auto out = apply_temporal_phase(env, phase);
    for (std::size_t j = 0; j < env.samples.size(); ++j)
      CHECK(out.samples[j] == env.samples[j]);
  }

  SECTION("linear temporal phase shifts the spectrum by exactly f_s bins") {
    // Under the e^{+iwt} analysis convention a +slope phase moves the
    // spectrum toward negative detuning; the shift magnitude is exact.
    const std::int64_t bins = 32;
    const double f_s = bins * grid.df();
    std::vector<double> phase(env.samples.size());
    for (std::size_t j = 0; j < phase.size(); ++j)
      phase[j] = two_pi * f_s * grid.time_at(static_cast<std::int64_t>(j));
    const auto spec = to_spectrum(env);
    const auto shifted = to_spectrum(apply_temporal_phase(env, phase));
    double max_dev = 0.0;
    for (std::int64_t k = 0; k < grid.n_samples - bins; ++k)
      max_dev = std::max(
          max_dev, std::abs(shifted.samples[static_cast<std::size_t>(k)] -
                            spec.samples[static_cast<std::size_t>(k + bins)]));
    CHECK(max_dev < 1e-12);
  }

  SECTION("wrapped and unwrapped parabola give identical spectra") {
    // exp(i phi) periodicity: any chirp rate, any 2*pi multiple as modulus.
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> log_rate(18.0, 20.5);
    std::uniform_int_distribution<int> sign(0, 1);
    for (int trial = 0; trial < 8; ++trial) {
      const double chirp_rate =
          (sign(rng) ? 1.0 : -1.0) * std::pow(10.0, log_rate(rng));
      const double modulus = (trial % 2 == 0) ? two_pi : 2.0 * two_pi;
      std::vector<double> wrapped(env.samples.size()), unwrapped(env.samples.size());
      for (std::size_t j = 0; j < wrapped.size(); ++j) {
        const double t = grid.time_at(static_cast<std::int64_t>(j));
        unwrapped[j] = 0.5 * chirp_rate * t * t;
        wrapped[j] = wrap_phase(unwrapped[j], modulus);
      }
      const auto a = to_spectrum(apply_temporal_phase(env, wrapped));
      const auto b = to_spectrum(apply_temporal_phase(env, unwrapped));
      double peak = 0.0, max_dev = 0.0;
      for (std::size_t k = 0; k < a.samples.size(); ++k) {
        peak = std::max(peak, std::abs(b.samples[k]));
        max_dev = std::max(max_dev, std::abs(a.samples[k] - b.samples[k]));
      }
      CHECK(max_dev / peak < 1e-12);
    }
  }

  SECTION("length mismatch and NaN throw") {
    std::vector<double> bad(env.samples.size() - 1, 0.0);
    CHECK_THROWS_AS(apply_temporal_phase(env, bad), std::invalid_argument);
    std::vector<double> nan_phase(env.samples.size(), 0.0);
    nan_phase[7] = std::nan("");
    CHECK_THROWS_AS(apply_temporal_phase(env, nan_phase), std::invalid_argument);
  }
}

TEST_CASE("modulation theorem moves the spectral centroid by f_s") {
  const auto grid = make_grid(1 << 12, 1.0e-12);
  GaussianPulseSource src;
  src.spectral_fwhm_hz = 5e9;
  const auto env = generate_pulse(src, grid);
  const double f_s = 17.5 * grid.df();  // deliberately off-bin
  std::vector<double> phase(env.samples.size());
  for (std::size_t j = 0; j < phase.size(); ++j)
    phase[j] = two_pi * f_s * grid.time_at(static_cast<std::int64_t>(j));
  const auto shifted = to_spectrum(apply_temporal_phase(env, phase));
  double w = 0.0, wf = 0.0;
  for (std::int64_t k = 0; k < grid.n_samples; ++k) {
    const double p = std::norm(shifted.samples[static_cast<std::size_t>(k)]);
    w += p;
    wf += p * shifted.freq_at(k);
  }
  CHECK(std::abs(wf / w - (-f_s)) <= 0.5 * grid.df());
}

TEST_CASE("apply_transmission") {
  const auto grid = make_grid(1 << 10, 1.0e-12);
  GaussianPulseSource src;
  src.spectral_fwhm_hz = 5e9;
  src.energy = 1.0;
  const auto env = generate_pulse(src, grid);

  const auto same = apply_transmission(env, 1.0);
  CHECK(energy(same) == Approx(1.0).epsilon(1e-12));

  const auto lossy = apply_transmission(env, 0.319);
  CHECK(energy(lossy) == Approx(0.319).epsilon(1e-12));

  const auto chain15 = apply_transmission(env, 0.16);
  CHECK(energy(chain15) == Approx(0.16).epsilon(1e-12));

  CHECK_THROWS_AS(apply_transmission(env, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(apply_transmission(env, 1.1), std::invalid_argument);
}
