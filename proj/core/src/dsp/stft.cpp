// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/dsp/stft.hpp"

#include <cmath>
#include <complex>
#include <cstring>

#include "pse/dsp/fft.hpp"
#include "pse/error.hpp"

namespace pse::dsp {

void StftConfig::validate() const {
  check(hop_len > 0, "bad_config", "hop_len must be positive");
  check(hop_len <= win_len, "bad_config", "hop_len must not exceed win_len");
  check(win_len <= fft_len, "bad_config", "win_len must not exceed fft_len");
}

std::vector<float> hann_window(int n) {
  std::vector<float> w(static_cast<size_t>(n));
  const double step = 2.0 * M_PI / static_cast<double>(n);
  for (int i = 0; i < n; ++i)
    w[static_cast<size_t>(i)] =
        static_cast<float>(0.5 - 0.5 * std::cos(step * i));
  return w;
}

ComplexSpectrogram stft(const AudioBuffer& audio, const StftConfig& cfg) {
  cfg.validate();
  check(!audio.samples.empty(), "bad_audio", "empty audio buffer");

  const int win = cfg.win_len;
  const int hop = cfg.hop_len;
  const int fft = cfg.fft_len;
  const i64 n = audio.size();

  std::vector<float> padded;
  const float* x = audio.samples.data();
  i64 n_work = n;
  if (cfg.center_pad) {
    padded.assign(static_cast<size_t>(n + 2 * win), 0.0f);
    std::memcpy(padded.data() + win, audio.samples.data(),
                static_cast<size_t>(n) * sizeof(float));
    x = padded.data();
    n_work = n + 2 * win;
  }
  check(n_work >= win, "input_too_short",
        "input too short: need at least one analysis window (" +
            std::to_string(win) + " samples)");

  const i64 frames = (n_work - win) / hop + 1;
  const int bins = cfg.bins();
  const std::vector<float> w = hann_window(win);

  ComplexSpectrogram out;
  out.config = cfg;
  out.real = Tensor({frames, bins});
  out.imag = Tensor({frames, bins});

  std::vector<float> frame(static_cast<size_t>(fft), 0.0f);
  std::vector<std::complex<float>> spec(static_cast<size_t>(bins));
  for (i64 t = 0; t < frames; ++t) {
    const float* src = x + t * hop;
    for (int k = 0; k < win; ++k)
      frame[static_cast<size_t>(k)] = src[k] * w[static_cast<size_t>(k)];
    rfft(fft, frame.data(), spec.data());
    float* re = &out.real(t, 0);
    float* im = &out.imag(t, 0);
    for (int b = 0; b < bins; ++b) {
      re[b] = spec[static_cast<size_t>(b)].real();
      im[b] = spec[static_cast<size_t>(b)].imag();
    }
  }
  return out;
}

AudioBuffer istft(const ComplexSpectrogram& spec, i64 out_len) {
  const StftConfig& cfg = spec.config;
  cfg.validate();
  check(cfg.cola(), "not_cola",
        "reconstruction not exact: window/hop do not satisfy "
        "constant overlap-add");
  check(spec.real.same_shape(spec.imag), "bad_shape",
        "real/imag plane shapes differ");

  const int win = cfg.win_len;
  const int hop = cfg.hop_len;
  const int fft = cfg.fft_len;
  const int bins = cfg.bins();
  const i64 frames = spec.frames();
  check(spec.bins() == bins, "bad_shape", "bin count does not match config");

  const std::vector<float> w = hann_window(win);
  const i64 n_work = frames > 0 ? (frames - 1) * hop + win : 0;
  std::vector<double> num(static_cast<size_t>(n_work), 0.0);
  std::vector<double> den(static_cast<size_t>(n_work), 0.0);

  std::vector<std::complex<float>> row(static_cast<size_t>(bins));
  std::vector<float> frame(static_cast<size_t>(fft));
  for (i64 t = 0; t < frames; ++t) {
    const float* re = &spec.real(t, 0);
    const float* im = &spec.imag(t, 0);
    for (int b = 0; b < bins; ++b)
      row[static_cast<size_t>(b)] = {re[b], im[b]};
    irfft(fft, row.data(), frame.data());
    const i64 base = t * hop;
    for (int k = 0; k < win; ++k) {
      const double wk = w[static_cast<size_t>(k)];
      num[static_cast<size_t>(base + k)] += frame[static_cast<size_t>(k)] * wk;
      den[static_cast<size_t>(base + k)] += wk * wk;
    }
  }

  const i64 offset = cfg.center_pad ? win : 0;
  AudioBuffer out;
  out.sample_rate = 48000;
  out.samples.assign(static_cast<size_t>(out_len), 0.0f);
  for (i64 i = 0; i < out_len; ++i) {
    const i64 p = i + offset;
    if (p >= n_work) break;
    const double d = den[static_cast<size_t>(p)];
    if (d > 1e-20)
      out.samples[static_cast<size_t>(i)] =
          static_cast<float>(num[static_cast<size_t>(p)] / d);
  }
  return out;
}

Tensor magnitude(const ComplexSpectrogram& spec) {
  check(spec.real.same_shape(spec.imag), "bad_shape",
        "real/imag plane shapes differ");
  Tensor mag(spec.real.shape());
  const float* re = spec.real.data();
  const float* im = spec.imag.data();
  float* m = mag.data();
  const i64 n = mag.size();
  for (i64 i = 0; i < n; ++i)
    m[i] = std::sqrt(re[i] * re[i] + im[i] * im[i]);
  return mag;
}

CompressedSpec power_law_compress(const ComplexSpectrogram& spec, float c) {
  check(c > 0.0f && c <= 1.0f, "bad_config",
        "compression exponent must be in (0, 1]");
  check(spec.real.same_shape(spec.imag), "bad_shape",
        "real/imag plane shapes differ");

  CompressedSpec out;
  out.mag_c = Tensor(spec.real.shape());
  out.complex_c.config = spec.config;
  out.complex_c.real = Tensor(spec.real.shape());
  out.complex_c.imag = Tensor(spec.imag.shape());

  const float* re = spec.real.data();
  const float* im = spec.imag.data();
  float* mc = out.mag_c.data();
  float* cre = out.complex_c.real.data();
  float* cim = out.complex_c.imag.data();
  const i64 n = out.mag_c.size();
  for (i64 i = 0; i < n; ++i) {
    const float mag = std::sqrt(re[i] * re[i] + im[i] * im[i]);
    if (mag > 0.0f) {
      const float m = std::pow(mag, c);
      const float scale = m / mag;
      mc[i] = m;
      cre[i] = re[i] * scale;
      cim[i] = im[i] * scale;
    }
  }
  return out;
}

}  // namespace pse::dsp
