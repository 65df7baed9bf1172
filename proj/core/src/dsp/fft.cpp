// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/dsp/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "pse/error.hpp"

namespace pse::dsp {
namespace {

// FFTW planning is not thread-safe; new-array execution is. Plans are created
// once per size with FFTW_UNALIGNED so they accept arbitrary caller buffers.
std::mutex g_plan_mutex;

fftwf_plan forward_plan(int n) {
  static std::map<int, fftwf_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<float> in(static_cast<size_t>(n));
  std::vector<fftwf_complex> out(static_cast<size_t>(n / 2 + 1));
  fftwf_plan p = fftwf_plan_dft_r2c_1d(n, in.data(), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
  check(p != nullptr, "fft_plan", "failed to create forward FFT plan");
  cache.emplace(n, p);
  return p;
}

fftwf_plan inverse_plan(int n) {
  static std::map<int, fftwf_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<fftwf_complex> in(static_cast<size_t>(n / 2 + 1));
  std::vector<float> out(static_cast<size_t>(n));
  fftwf_plan p = fftwf_plan_dft_c2r_1d(n, in.data(), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
  check(p != nullptr, "fft_plan", "failed to create inverse FFT plan");
  cache.emplace(n, p);
  return p;
}

}  // namespace

void rfft(int n, const float* in, std::complex<float>* out) {
  fftwf_plan p = forward_plan(n);
  // r2c new-array execution does not modify the input.
  fftwf_execute_dft_r2c(p, const_cast<float*>(in),
                        reinterpret_cast<fftwf_complex*>(out));
}

void irfft(int n, const std::complex<float>* in, float* out) {
  fftwf_plan p = inverse_plan(n);
  // c2r transforms clobber their input, so run on a scratch copy.
  thread_local std::vector<std::complex<float>> scratch;
  scratch.assign(in, in + (n / 2 + 1));
  fftwf_execute_dft_c2r(p, reinterpret_cast<fftwf_complex*>(scratch.data()),
                        out);
  const float inv = 1.0f / static_cast<float>(n);
  for (int i = 0; i < n; ++i) out[i] *= inv;
}

}  // namespace pse::dsp
