#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace timelens::detail {

/// Process-wide FFTW plan cache. One plan per (length, direction), created
/// with FFTW_ESTIMATE|FFTW_UNALIGNED and executed through the new-array
/// interface, so repeated transforms of the same length use the same
/// algorithm and stay bit-identical across runs and threads.
inline fftw_plan fft_plan(std::size_t n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, fftw_plan> cache;

  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  // FFTW_ESTIMATE does not touch the arrays; they only fix the signature.
  std::vector<std::complex<double>> in(n), out(n);
  fftw_plan plan = fftw_plan_dft_1d(
      static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
      reinterpret_cast<fftw_complex*>(out.data()), sign,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw std::runtime_error("fftw plan creation failed");
  cache.emplace(key, plan);
  return plan;
}

/// Unnormalized DFT, out[k] = Σ_j in[j]·exp(sign·2πi·jk/n). in and out must
/// be distinct buffers of length n.
inline void fft_execute(const std::complex<double>* in, std::complex<double>* out,
                        std::size_t n, int sign) {
  fftw_plan plan = fft_plan(n, sign);
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(
                       const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

inline constexpr int fft_forward = FFTW_FORWARD;    // exp(-2πi jk/n)
inline constexpr int fft_backward = FFTW_BACKWARD;  // exp(+2πi jk/n)

}  // namespace timelens::detail
