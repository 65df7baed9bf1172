// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/model/stats.hpp"

namespace pse::model {

ParamStats param_stats(const ParameterRegistry& registry) {
  ParamStats out;
  out.total = registry.count_params();
  for (ParamGroup g : all_groups())
    out.per_group.emplace_back(to_string(g), registry.count_params(g));
  return out;
}

MacStats mac_stats(const ModelConfig& cfg) {
  cfg.validate();
  const std::vector<i64> chain = cfg.freq_chain();
  const i64 c = cfg.conv_channels;
  const i64 ktf = static_cast<i64>(cfg.kernel_t) * cfg.kernel_f;
  const i64 d = cfg.bottleneck_dim();
  const i64 bins = chain[0];

  auto encoder = [&](i64 in0) {
    i64 m = 2 * in0 * c * ktf * chain[1];
    for (int i = 1; i < cfg.n_fd; ++i)
      m += 2 * (c + cfg.spk_channels) * c * ktf * chain[static_cast<size_t>(i) + 1];
    return m;
  };

  i64 temporal_group = 0;
  for (int b = 0; b < cfg.stcm_per_group; ++b)
    temporal_group += d * c + c * c * cfg.dconv_kernel + c * d;
  temporal_group += 4 * d * (d + d);  // residual LSTM, hidden == d
  const i64 temporal = cfg.n_stcnl_groups * temporal_group;

  i64 decoder = 0;
  for (int j = 0; j < cfg.n_fu; ++j)
    decoder += 2 * (2 * c) * c * ktf * chain[static_cast<size_t>(cfg.n_fd - j)];
  const i64 head = c * bins;

  const i64 h_dir = cfg.spk_blstm_hidden / 2;
  i64 spk = 2 * (4 * h_dir * (bins + h_dir));       // BLSTM, both directions
  spk += static_cast<i64>(cfg.spk_blstm_hidden) * bins;  // dense back to bins
  for (int l = 0; l < cfg.spk_fd_layers; ++l)
    spk += 2 * cfg.spk_channels * cfg.spk_channels * ktf *
           chain[static_cast<size_t>(l) + 1];

  const i64 fusion = static_cast<i64>(cfg.embedding_dim) * d;

  const i64 mag_enc = encoder(1);
  const i64 com_enc = encoder(4);
  const i64 mag_dec = decoder + head;
  const i64 com_dec = 2 * (decoder + head);

  MacStats out;
  out.parts = {
      {"mag_encoder", mag_enc},   {"mag_temporal", temporal},
      {"mag_decoder", mag_dec},   {"com_encoder", com_enc},
      {"com_temporal", temporal}, {"com_decoder", com_dec},
      {"spk_enc_mag", spk},       {"spk_enc_com", spk},
      {"fusion", 2 * fusion},
  };
  for (const auto& [name, macs] : out.parts) out.per_frame += macs;
  const i64 fps = cfg.sample_rate / cfg.stft.hop_len;
  out.per_second = out.per_frame * fps;
  return out;
}

}  // namespace pse::model
