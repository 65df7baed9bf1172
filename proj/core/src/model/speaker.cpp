// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cstring>

#include "pse/error.hpp"
#include "pse/model/model.hpp"

namespace pse::model {

SpeakerEncoder::SpeakerEncoder(const ModelConfig& cfg) {
  bins_ = cfg.stft.bins();
  blstm = nn::Blstm(bins_, cfg.spk_blstm_hidden / 2);
  dense = nn::Dense(cfg.spk_blstm_hidden, bins_);

  const std::vector<i64> chain = cfg.freq_chain();
  levels.resize(static_cast<size_t>(cfg.spk_fd_layers));
  level_freqs.clear();
  for (int l = 0; l < cfg.spk_fd_layers; ++l) {
    Level& lv = levels[static_cast<size_t>(l)];
    lv.conv = nn::GConv2d(cfg.spk_channels, cfg.spk_channels, cfg.kernel_t,
                          cfg.kernel_f, cfg.stride_f, cfg.pad_f());
    lv.cln = nn::CumLayerNorm(cfg.spk_channels);
    lv.act = nn::PReLU(cfg.spk_channels);
    level_freqs.push_back(chain[static_cast<size_t>(l) + 1]);
  }
}

void SpeakerEncoder::init(Rng& rng) {
  blstm.init(rng);
  dense.init(rng);
  for (Level& lv : levels) {
    lv.conv.init(rng);
    lv.cln.init();
    lv.act.init();
  }
}

std::vector<std::vector<float>> SpeakerEncoder::forward(
    const Tensor& enroll_mag) const {
  check(enroll_mag.rank() == 2 && enroll_mag.dim(1) == bins_, "bad_shape",
        "enrollment magnitude shape mismatch: got " + enroll_mag.shape_str());
  const i64 t_len = enroll_mag.dim(0);
  check(t_len >= 1, "bad_audio", "empty enrollment");

  Tensor h = blstm.forward(enroll_mag);
  Tensor d = dense.forward(h);  // [T, bins]

  // Single-channel feature map for the down-sampling chain.
  Tensor x({1, t_len, static_cast<i64>(bins_)});
  std::memcpy(x.data(), d.data(), static_cast<size_t>(d.size()) * sizeof(float));

  std::vector<std::vector<float>> pooled;
  pooled.reserve(levels.size());
  for (const Level& lv : levels) {
    x = lv.conv.forward(x);
    x = lv.cln.forward(x);
    lv.act.apply_inplace(x);

    const i64 f = x.dim(2);
    std::vector<double> acc(static_cast<size_t>(f), 0.0);
    for (i64 t = 0; t < t_len; ++t)
      for (i64 i = 0; i < f; ++i) acc[static_cast<size_t>(i)] += x(0, t, i);
    std::vector<float> mean(static_cast<size_t>(f));
    for (i64 i = 0; i < f; ++i)
      mean[static_cast<size_t>(i)] =
          static_cast<float>(acc[static_cast<size_t>(i)] /
                             static_cast<double>(t_len));
    pooled.push_back(std::move(mean));
  }
  return pooled;
}

}  // namespace pse::model
