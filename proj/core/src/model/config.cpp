// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/model/config.hpp"

#include "pse/error.hpp"
#include "pse/nn/layers.hpp"

namespace pse::model {

std::vector<i64> ModelConfig::freq_chain() const {
  std::vector<i64> chain;
  chain.push_back(stft.bins());
  for (int i = 0; i < n_fd; ++i)
    chain.push_back(
        nn::GConv2d::out_freq(chain.back(), kernel_f, stride_f, pad_f()));
  return chain;
}

i64 ModelConfig::bottleneck_dim() const {
  return static_cast<i64>(conv_channels) * freq_chain().back();
}

void ModelConfig::validate() const {
  stft.validate();
  check(n_fd > 0 && n_fu > 0, "bad_config", "need at least one level per side");
  check(n_fu == n_fd, "bad_config",
        "up-sampling level count must match down-sampling level count");
  check(conv_channels > 0, "bad_config", "conv_channels must be positive");
  check(kernel_t >= 1 && kernel_f >= 1, "bad_config",
        "kernel extents must be positive");
  check(stride_t == 1, "bad_config",
        "time stride must be 1 for frame-synchronous streaming");
  check(stride_f >= 1, "bad_config", "frequency stride must be positive");
  check(kernel_f % 2 == 1, "bad_config",
        "frequency kernel must be odd for symmetric padding");
  check(n_stcnl_groups > 0, "bad_config", "need at least one temporal group");
  check(stcm_per_group > 0, "bad_config",
        "need at least one temporal block per group");
  check(static_cast<int>(dilations.size()) == stcm_per_group, "bad_config",
        "dilation list length must equal blocks per group");
  for (int d : dilations)
    check(d >= 1, "bad_config", "dilations must be positive");
  check(dconv_kernel >= 1, "bad_config", "dconv kernel must be positive");
  check(lstm_hidden > 0, "bad_config", "lstm_hidden must be positive");
  check(spk_blstm_hidden > 0 && spk_blstm_hidden % 2 == 0, "bad_config",
        "speaker BLSTM width must be positive and even (split across "
        "directions)");
  check(spk_channels == 1, "bad_config",
        "speaker branch supports exactly one channel");
  check(embedding_dim > 0, "bad_config", "embedding_dim must be positive");
  check(compression > 0.0f && compression <= 1.0f, "bad_config",
        "compression exponent must be in (0, 1]");
  check(sample_rate == 48000, "bad_config",
        "model paths are defined at 48 kHz");
  check(!stft.center_pad, "bad_config",
        "model front-end runs without center padding");
  check(stft.cola(), "bad_config",
        "model front-end window/hop must satisfy constant overlap-add");

  const std::vector<i64> chain = freq_chain();
  for (size_t i = 0; i < chain.size(); ++i)
    check(chain[i] >= 1, "bad_config",
          "down-sampling chain reduces the frequency extent below 1 at level " +
              std::to_string(i));
  check(bottleneck_dim() == lstm_hidden, "bad_config",
        "lstm_hidden must equal conv_channels * bottleneck frequency extent (" +
            std::to_string(bottleneck_dim()) + ")");
  check(spk_fd_layers == n_fd - 1, "bad_config",
        "speaker encoder must provide one level per main encoder concat "
        "point (n_fd - 1)");
}

ModelConfig ModelConfig::toy() {
  ModelConfig cfg;
  cfg.n_fd = 2;
  cfg.n_fu = 2;
  cfg.conv_channels = 4;
  cfg.n_stcnl_groups = 1;
  cfg.stcm_per_group = 2;
  cfg.dilations = {1, 2};
  cfg.dconv_kernel = 5;
  cfg.lstm_hidden = 8;
  cfg.spk_blstm_hidden = 8;
  cfg.spk_fd_layers = 1;
  cfg.embedding_dim = 5;
  cfg.stft = dsp::StftConfig{10, 10, 5, dsp::Window::hann, false};
  return cfg;
}

}  // namespace pse::model
