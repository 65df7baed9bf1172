// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <vector>

#include "pse/dsp/stft.hpp"
#include "pse/tensor.hpp"

namespace pse::model {

using pse::i64;

struct ModelConfig {
  int n_fd = 6;
  int n_fu = 6;
  int conv_channels = 64;
  int kernel_t = 2;
  int kernel_f = 3;
  int stride_t = 1;
  int stride_f = 2;
  int n_stcnl_groups = 4;
  int stcm_per_group = 4;
  std::vector<int> dilations = {1, 2, 5, 9};
  int dconv_kernel = 5;
  int lstm_hidden = 512;
  // Concatenated width across both directions (half per direction).
  int spk_blstm_hidden = 512;
  int spk_fd_layers = 5;
  int spk_channels = 1;
  int embedding_dim = 192;
  dsp::StftConfig stft{960, 960, 480, dsp::Window::hann, false};
  float compression = 0.3f;
  int sample_rate = 48000;

  int pad_f() const { return (kernel_f - 1) / 2; }

  // Frequency extents along the down-sampling chain: [bins, F1, .., F_n_fd].
  std::vector<i64> freq_chain() const;

  // Flattened bottleneck width: conv_channels * F_n_fd.
  i64 bottleneck_dim() const;

  void validate() const;

  // Small configuration used by tests; exercises every code path.
  static ModelConfig toy();
};

}  // namespace pse::model
