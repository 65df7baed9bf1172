// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <vector>

#include "pse/tensor.hpp"

namespace pse::dsp {

enum class Window { hann };

struct StftConfig {
  int fft_len = 960;
  int win_len = 960;
  int hop_len = 480;
  Window window = Window::hann;
  // When true the signal is zero-padded by win_len on both sides so every
  // input sample is covered by a full set of overlapping windows.
  bool center_pad = false;

  int bins() const { return fft_len / 2 + 1; }

  // Constant-overlap-add holds for the hann window at 50% overlap; exact
  // inversion elsewhere is not guaranteed.
  bool cola() const { return window == Window::hann && win_len == 2 * hop_len; }

  bool operator==(const StftConfig& o) const {
    return fft_len == o.fft_len && win_len == o.win_len &&
           hop_len == o.hop_len && window == o.window &&
           center_pad == o.center_pad;
  }

  void validate() const;
};

struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate = 48000;

  i64 size() const { return static_cast<i64>(samples.size()); }
};

struct ComplexSpectrogram {
  Tensor real;  // [frames, bins]
  Tensor imag;  // [frames, bins]
  StftConfig config;

  i64 frames() const { return real.rank() ? real.dim(0) : 0; }
  i64 bins() const { return real.rank() ? real.dim(1) : 0; }
};

// Periodic hann window of length n.
std::vector<float> hann_window(int n);

ComplexSpectrogram stft(const AudioBuffer& audio, const StftConfig& cfg);

// Weighted overlap-add inverse with sum-of-squared-window normalization.
// Requires a COLA-valid config. Output trimmed / zero-extended to out_len.
AudioBuffer istft(const ComplexSpectrogram& spec, i64 out_len);

// |S| per bin, shape [frames, bins].
Tensor magnitude(const ComplexSpectrogram& spec);

struct CompressedSpec {
  Tensor mag_c;                // |S|^c
  ComplexSpectrogram complex_c;  // |S|^c * e^{j arg S}
};

// Power-law compression with exponent c in (0, 1]. Zero bins stay zero.
CompressedSpec power_law_compress(const ComplexSpectrogram& spec, float c);

}  // namespace pse::dsp
