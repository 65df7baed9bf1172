// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/model/model.hpp"

#include <cmath>
#include <cstring>

#include "pse/error.hpp"

namespace pse::model {
namespace {

inline float sigmoidf(float x) { return 1.0f / (1.0f + std::exp(-x)); }

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  check(a.dim(1) == b.dim(1), "bad_shape",
        "channel concat frequency mismatch: " + a.shape_str() + " vs " +
            b.shape_str());
  Tensor y({a.dim(0) + b.dim(0), a.dim(1)});
  std::memcpy(y.data(), a.data(), static_cast<size_t>(a.size()) * sizeof(float));
  std::memcpy(y.data() + a.size(), b.data(),
              static_cast<size_t>(b.size()) * sizeof(float));
  return y;
}

Tensor concat_channel_vec(const Tensor& a, const std::vector<float>& v) {
  check(a.dim(1) == static_cast<i64>(v.size()), "bad_shape",
        "speaker feature length does not match encoder level width");
  Tensor y({a.dim(0) + 1, a.dim(1)});
  std::memcpy(y.data(), a.data(), static_cast<size_t>(a.size()) * sizeof(float));
  std::memcpy(y.data() + a.size(), v.data(), v.size() * sizeof(float));
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// Blocks

FdBlock::State FdBlock::make_state(i64 f_in) const {
  return State{conv.make_state(f_in), {}};
}

Tensor FdBlock::step(State& st, const Tensor& x) const {
  Tensor y = conv.step(st.conv, x);
  y = cln.step(st.cln, y);
  act.apply_inplace(y);
  return y;
}

FuBlock::State FuBlock::make_state(i64 f_in) const {
  return State{conv.make_state(f_in), {}};
}

Tensor FuBlock::step(State& st, const Tensor& x) const {
  Tensor y = conv.step(st.conv, x);
  y = cln.step(st.cln, y);
  act.apply_inplace(y);
  return y;
}

std::vector<float> Head::apply(const Tensor& frame) const {
  const i64 c = frame.dim(0), f = frame.dim(1);
  check(c == w.size(), "bad_shape", "head channel mismatch");
  std::vector<float> out(static_cast<size_t>(f), b(0));
  for (i64 ch = 0; ch < c; ++ch) {
    const float wc = w(ch);
    const float* row = &frame(ch, 0);
    for (i64 i = 0; i < f; ++i) out[static_cast<size_t>(i)] += wc * row[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// StcnlGroup

StcnlGroup::StcnlGroup(int dim, int channels, int kernel,
                       const std::vector<int>& dilations) {
  for (int d : dilations) stcms.emplace_back(dim, channels, kernel, d);
  lstm = nn::Lstm(dim, dim);
}

void StcnlGroup::init(Rng& rng) {
  for (nn::Stcm& s : stcms) s.init(rng);
  lstm.init(rng);
}

StcnlGroup::State StcnlGroup::make_state() const {
  State st;
  for (const nn::Stcm& s : stcms) st.stcms.push_back(s.make_state());
  st.lstm = lstm.make_state();
  st.scratch.assign(static_cast<size_t>(lstm.hidden()), 0.0f);
  return st;
}

std::vector<float> StcnlGroup::step(State& st, const std::vector<float>& x,
                                    const std::vector<float>* gate) const {
  std::vector<float> v = x;
  if (gate != nullptr) {
    check(gate->size() == v.size(), "bad_shape",
          "fusion gate width does not match bottleneck");
    for (size_t i = 0; i < v.size(); ++i) v[i] *= (*gate)[i];
  }
  for (size_t i = 0; i < stcms.size(); ++i) v = stcms[i].step(st.stcms[i], v);
  lstm.step(st.lstm, v.data(), st.scratch.data());
  for (size_t i = 0; i < v.size(); ++i) v[i] += st.scratch[i];
  return v;
}

// ---------------------------------------------------------------------------
// StageNet

StageNet::StageNet(const ModelConfig& cfg, int in_channels, int n_decoders,
                   bool sigmoid_head)
    : in_channels_(in_channels), sigmoid_head_(sigmoid_head) {
  freqs_ = cfg.freq_chain();
  channels_ = cfg.conv_channels;
  const int c = cfg.conv_channels;
  const i64 d = cfg.bottleneck_dim();

  fd.resize(static_cast<size_t>(cfg.n_fd));
  for (int l = 0; l < cfg.n_fd; ++l) {
    const int cin = l == 0 ? in_channels : c + cfg.spk_channels;
    FdBlock& blk = fd[static_cast<size_t>(l)];
    blk.conv = nn::GConv2d(cin, c, cfg.kernel_t, cfg.kernel_f, cfg.stride_f,
                           cfg.pad_f());
    blk.cln = nn::CumLayerNorm(c);
    blk.act = nn::PReLU(c);
  }

  for (int g = 0; g < cfg.n_stcnl_groups; ++g)
    groups.emplace_back(static_cast<int>(d), c, cfg.dconv_kernel,
                        cfg.dilations);

  decoders.resize(static_cast<size_t>(n_decoders));
  heads.resize(static_cast<size_t>(n_decoders));
  for (int dec = 0; dec < n_decoders; ++dec) {
    auto& chain = decoders[static_cast<size_t>(dec)];
    chain.resize(static_cast<size_t>(cfg.n_fu));
    for (int j = 0; j < cfg.n_fu; ++j) {
      FuBlock& blk = chain[static_cast<size_t>(j)];
      const i64 target = freqs_[static_cast<size_t>(cfg.n_fd - 1 - j)];
      blk.conv = nn::TrGConv2d(2 * c, c, cfg.kernel_t, cfg.kernel_f,
                               cfg.stride_f, cfg.pad_f(), target);
      blk.cln = nn::CumLayerNorm(c);
      blk.act = nn::PReLU(c);
    }
    heads[static_cast<size_t>(dec)].w = Tensor({c});
    heads[static_cast<size_t>(dec)].b = Tensor({1});
  }
}

void StageNet::init(Rng& rng) {
  for (FdBlock& blk : fd) {
    blk.conv.init(rng);
    blk.cln.init();
    blk.act.init();
  }
  for (StcnlGroup& g : groups) g.init(rng);
  for (auto& chain : decoders)
    for (FuBlock& blk : chain) {
      blk.conv.init(rng);
      blk.cln.init();
      blk.act.init();
    }
  for (Head& h : heads) {
    nn::init_uniform_fan_in(h.w, channels_, rng);
    nn::init_uniform_fan_in(h.b, channels_, rng);
  }
}

StageNet::State StageNet::make_state() const {
  State st;
  for (size_t l = 0; l < fd.size(); ++l)
    st.fd.push_back(fd[l].make_state(freqs_[l]));
  for (const StcnlGroup& g : groups) st.groups.push_back(g.make_state());
  st.decoders.resize(decoders.size());
  const size_t n_fd = fd.size();
  for (size_t dec = 0; dec < decoders.size(); ++dec)
    for (size_t j = 0; j < decoders[dec].size(); ++j)
      st.decoders[dec].push_back(
          decoders[dec][j].make_state(freqs_[n_fd - j]));
  return st;
}

std::vector<std::vector<float>> StageNet::step(State& st,
                                               const Tensor& in_frame,
                                               const SpeakerFeatures& spk) const {
  check(in_frame.rank() == 2 && in_frame.dim(0) == in_channels_ &&
            in_frame.dim(1) == freqs_[0],
        "bad_shape", "stage input frame shape mismatch: got " +
                         in_frame.shape_str());
  check(spk.levels.size() + 1 == fd.size(), "bad_shape",
        "speaker level count does not match encoder depth");

  std::vector<Tensor> enc(fd.size());
  Tensor x = in_frame;
  for (size_t l = 0; l < fd.size(); ++l) {
    if (l > 0) x = concat_channel_vec(x, spk.levels[l - 1]);
    x = fd[l].step(st.fd[l], x);
    enc[l] = x;
  }

  // Flatten [C, F] row-major into the bottleneck vector.
  std::vector<float> v(static_cast<size_t>(x.size()));
  std::memcpy(v.data(), x.data(), static_cast<size_t>(x.size()) * sizeof(float));
  const std::vector<float>* gate = spk.gate.empty() ? nullptr : &spk.gate;
  for (size_t g = 0; g < groups.size(); ++g)
    v = groups[g].step(st.groups[g], v, gate);

  Tensor bottleneck({static_cast<i64>(channels_), freqs_.back()});
  std::memcpy(bottleneck.data(), v.data(), v.size() * sizeof(float));

  const size_t n_fd = fd.size();
  std::vector<std::vector<float>> outs;
  outs.reserve(decoders.size());
  for (size_t dec = 0; dec < decoders.size(); ++dec) {
    Tensor t = bottleneck;
    for (size_t j = 0; j < decoders[dec].size(); ++j) {
      t = concat_channels(t, enc[n_fd - 1 - j]);
      t = decoders[dec][j].step(st.decoders[dec][j], t);
    }
    std::vector<float> plane = heads[dec].apply(t);
    if (sigmoid_head_)
      for (float& p : plane) p = sigmoidf(p);
    outs.push_back(std::move(plane));
  }
  return outs;
}

// ---------------------------------------------------------------------------
// Model

std::unique_ptr<Model> Model::build(const ModelConfig& cfg,
                                    std::uint64_t seed) {
  cfg.validate();
  std::unique_ptr<Model> m(new Model());
  m->cfg_ = cfg;
  m->mag_stage = StageNet(cfg, 1, 1, true);
  m->com_stage = StageNet(cfg, 4, 2, false);
  m->spk_mag = SpeakerEncoder(cfg);
  m->spk_com = SpeakerEncoder(cfg);
  m->fusion_mag =
      nn::Dense(cfg.embedding_dim, static_cast<int>(cfg.bottleneck_dim()));
  m->fusion_com =
      nn::Dense(cfg.embedding_dim, static_cast<int>(cfg.bottleneck_dim()));

  Rng rng(seed);
  m->mag_stage.init(rng);
  m->com_stage.init(rng);
  m->spk_mag.init(rng);
  m->spk_com.init(rng);
  m->fusion_mag.init(rng);
  m->fusion_com.init(rng);

  m->register_params();
  return m;
}

namespace {

void register_stage(ParameterRegistry& reg, const std::string& prefix,
                    ParamGroup group, StageNet& s) {
  for (size_t l = 0; l < s.fd.size(); ++l) {
    const std::string p = prefix + ".fd" + std::to_string(l);
    FdBlock& blk = s.fd[l];
    reg.add(p + ".conv.content_kernel", group, &blk.conv.content_kernel);
    reg.add(p + ".conv.content_bias", group, &blk.conv.content_bias);
    reg.add(p + ".conv.gate_kernel", group, &blk.conv.gate_kernel);
    reg.add(p + ".conv.gate_bias", group, &blk.conv.gate_bias);
    reg.add(p + ".norm.gamma", group, &blk.cln.gamma);
    reg.add(p + ".norm.beta", group, &blk.cln.beta);
    reg.add(p + ".act.slope", group, &blk.act.slope);
  }
  for (size_t g = 0; g < s.groups.size(); ++g) {
    StcnlGroup& grp = s.groups[g];
    for (size_t b = 0; b < grp.stcms.size(); ++b) {
      const std::string p =
          prefix + ".g" + std::to_string(g) + ".b" + std::to_string(b);
      nn::Stcm& blk = grp.stcms[b];
      reg.add(p + ".pconv_in.w", group, &blk.pconv_in.w);
      reg.add(p + ".pconv_in.b", group, &blk.pconv_in.b);
      reg.add(p + ".act1.slope", group, &blk.act1.slope);
      reg.add(p + ".norm1.gamma", group, &blk.norm1.gamma);
      reg.add(p + ".norm1.beta", group, &blk.norm1.beta);
      reg.add(p + ".dconv.kernel", group, &blk.dconv_kernel);
      reg.add(p + ".dconv.bias", group, &blk.dconv_bias);
      reg.add(p + ".act2.slope", group, &blk.act2.slope);
      reg.add(p + ".norm2.gamma", group, &blk.norm2.gamma);
      reg.add(p + ".norm2.beta", group, &blk.norm2.beta);
      reg.add(p + ".pconv_out.w", group, &blk.pconv_out.w);
      reg.add(p + ".pconv_out.b", group, &blk.pconv_out.b);
    }
    const std::string p = prefix + ".g" + std::to_string(g) + ".lstm";
    reg.add(p + ".w_ih", group, &grp.lstm.w_ih);
    reg.add(p + ".w_hh", group, &grp.lstm.w_hh);
    reg.add(p + ".bias", group, &grp.lstm.bias);
  }
  for (size_t dec = 0; dec < s.decoders.size(); ++dec) {
    for (size_t j = 0; j < s.decoders[dec].size(); ++j) {
      const std::string p =
          prefix + ".dec" + std::to_string(dec) + ".fu" + std::to_string(j);
      FuBlock& blk = s.decoders[dec][j];
      reg.add(p + ".conv.content_kernel", group, &blk.conv.content_kernel);
      reg.add(p + ".conv.content_bias", group, &blk.conv.content_bias);
      reg.add(p + ".conv.gate_kernel", group, &blk.conv.gate_kernel);
      reg.add(p + ".conv.gate_bias", group, &blk.conv.gate_bias);
      reg.add(p + ".norm.gamma", group, &blk.cln.gamma);
      reg.add(p + ".norm.beta", group, &blk.cln.beta);
      reg.add(p + ".act.slope", group, &blk.act.slope);
    }
    const std::string p = prefix + ".dec" + std::to_string(dec) + ".head";
    reg.add(p + ".w", group, &s.heads[dec].w);
    reg.add(p + ".b", group, &s.heads[dec].b);
  }
}

void register_speaker(ParameterRegistry& reg, const std::string& prefix,
                      ParamGroup group, SpeakerEncoder& enc) {
  reg.add(prefix + ".blstm.fw.w_ih", group, &enc.blstm.fw.w_ih);
  reg.add(prefix + ".blstm.fw.w_hh", group, &enc.blstm.fw.w_hh);
  reg.add(prefix + ".blstm.fw.bias", group, &enc.blstm.fw.bias);
  reg.add(prefix + ".blstm.bw.w_ih", group, &enc.blstm.bw.w_ih);
  reg.add(prefix + ".blstm.bw.w_hh", group, &enc.blstm.bw.w_hh);
  reg.add(prefix + ".blstm.bw.bias", group, &enc.blstm.bw.bias);
  reg.add(prefix + ".dense.w", group, &enc.dense.w);
  reg.add(prefix + ".dense.b", group, &enc.dense.b);
  for (size_t l = 0; l < enc.levels.size(); ++l) {
    const std::string p = prefix + ".fd" + std::to_string(l);
    SpeakerEncoder::Level& lv = enc.levels[l];
    reg.add(p + ".conv.content_kernel", group, &lv.conv.content_kernel);
    reg.add(p + ".conv.content_bias", group, &lv.conv.content_bias);
    reg.add(p + ".conv.gate_kernel", group, &lv.conv.gate_kernel);
    reg.add(p + ".conv.gate_bias", group, &lv.conv.gate_bias);
    reg.add(p + ".norm.gamma", group, &lv.cln.gamma);
    reg.add(p + ".norm.beta", group, &lv.cln.beta);
    reg.add(p + ".act.slope", group, &lv.act.slope);
  }
}

}  // namespace

void Model::register_params() {
  register_stage(registry_, "mag", ParamGroup::MagNet, mag_stage);
  register_stage(registry_, "com", ParamGroup::ComNet, com_stage);
  register_speaker(registry_, "spk_mag", ParamGroup::SpkEncMag, spk_mag);
  register_speaker(registry_, "spk_com", ParamGroup::SpkEncCom, spk_com);
  registry_.add("fusion.mag.w", ParamGroup::FusionMag, &fusion_mag.w);
  registry_.add("fusion.mag.b", ParamGroup::FusionMag, &fusion_mag.b);
  registry_.add("fusion.com.w", ParamGroup::FusionCom, &fusion_com.w);
  registry_.add("fusion.com.b", ParamGroup::FusionCom, &fusion_com.b);
}

Model::Conditioning Model::condition(const dsp::AudioBuffer& enroll,
                                     const SpeakerEmbedding& emb) const {
  check(enroll.sample_rate == cfg_.sample_rate, "bad_sample_rate",
        "enrollment sample rate must be " + std::to_string(cfg_.sample_rate));
  dsp::ComplexSpectrogram spec = dsp::stft(enroll, cfg_.stft);
  return condition_from_mag(dsp::magnitude(spec), emb);
}

Model::Conditioning Model::condition_from_mag(const Tensor& enroll_mag,
                                              const SpeakerEmbedding& emb) const {
  check(static_cast<int>(emb.e.size()) == cfg_.embedding_dim, "bad_embedding",
        "embedding length must be " + std::to_string(cfg_.embedding_dim));
  Conditioning cond;
  cond.mag.levels = spk_mag.forward(enroll_mag);
  cond.com.levels = spk_com.forward(enroll_mag);
  cond.mag.gate = fusion_mag.apply(emb.e);
  cond.com.gate = fusion_com.apply(emb.e);
  return cond;
}

Model::State Model::make_state() const {
  return State{mag_stage.make_state(), com_stage.make_state()};
}

void Model::step(State& st, const float* noisy_re, const float* noisy_im,
                 const Conditioning& cond, float* out_re, float* out_im,
                 float* stage1_re, float* stage1_im) const {
  const i64 bins = cfg_.stft.bins();

  Tensor mag_frame({1, bins});
  for (i64 f = 0; f < bins; ++f)
    mag_frame(0, f) = std::sqrt(noisy_re[f] * noisy_re[f] +
                                noisy_im[f] * noisy_im[f]);

  const std::vector<float> mask =
      mag_stage.step(st.mag, mag_frame, cond.mag)[0];

  // First-stage spectrum: masked magnitude under the noisy phase. The mask
  // multiplies the complex bins directly, which is the same value without a
  // 0/0 hazard at silent bins.
  Tensor com_in({4, bins});
  for (i64 f = 0; f < bins; ++f) {
    const float s1r = mask[static_cast<size_t>(f)] * noisy_re[f];
    const float s1i = mask[static_cast<size_t>(f)] * noisy_im[f];
    com_in(0, f) = noisy_re[f];
    com_in(1, f) = noisy_im[f];
    com_in(2, f) = s1r;
    com_in(3, f) = s1i;
    if (stage1_re != nullptr) stage1_re[f] = s1r;
    if (stage1_im != nullptr) stage1_im[f] = s1i;
  }

  const std::vector<std::vector<float>> res =
      com_stage.step(st.com, com_in, cond.com);
  for (i64 f = 0; f < bins; ++f) {
    out_re[f] = com_in(2, f) + res[0][static_cast<size_t>(f)];
    out_im[f] = com_in(3, f) + res[1][static_cast<size_t>(f)];
  }
}

Tensor Model::magnet_forward(const Tensor& noisy_mag,
                             const SpeakerFeatures& spk) const {
  const i64 bins = cfg_.stft.bins();
  check(noisy_mag.rank() == 2 && noisy_mag.dim(1) == bins, "bad_shape",
        "magnitude shape mismatch: got " + noisy_mag.shape_str());
  const i64 t_len = noisy_mag.dim(0);
  Tensor est({t_len, bins});
  StageNet::State st = mag_stage.make_state();
  Tensor frame({1, bins});
  for (i64 t = 0; t < t_len; ++t) {
    std::memcpy(frame.data(), &noisy_mag(t, 0),
                static_cast<size_t>(bins) * sizeof(float));
    const std::vector<float> mask = mag_stage.step(st, frame, spk)[0];
    for (i64 f = 0; f < bins; ++f)
      est(t, f) = mask[static_cast<size_t>(f)] * noisy_mag(t, f);
  }
  return est;
}

dsp::ComplexSpectrogram Model::comnet_forward(
    const dsp::ComplexSpectrogram& noisy, const dsp::ComplexSpectrogram& stage1,
    const SpeakerFeatures& spk) const {
  check(noisy.config == stage1.config, "bad_config",
        "spectrogram configs differ between stages");
  check(noisy.real.same_shape(stage1.real), "bad_shape",
        "spectrogram shapes differ between stages");
  const i64 bins = cfg_.stft.bins();
  check(noisy.bins() == bins, "bad_shape", "bin count mismatch");

  const i64 t_len = noisy.frames();
  dsp::ComplexSpectrogram est;
  est.config = noisy.config;
  est.real = Tensor({t_len, bins});
  est.imag = Tensor({t_len, bins});

  StageNet::State st = com_stage.make_state();
  Tensor frame({4, bins});
  for (i64 t = 0; t < t_len; ++t) {
    for (i64 f = 0; f < bins; ++f) {
      frame(0, f) = noisy.real(t, f);
      frame(1, f) = noisy.imag(t, f);
      frame(2, f) = stage1.real(t, f);
      frame(3, f) = stage1.imag(t, f);
    }
    const std::vector<std::vector<float>> res = com_stage.step(st, frame, spk);
    for (i64 f = 0; f < bins; ++f) {
      est.real(t, f) = stage1.real(t, f) + res[0][static_cast<size_t>(f)];
      est.imag(t, f) = stage1.imag(t, f) + res[1][static_cast<size_t>(f)];
    }
  }
  return est;
}

dsp::AudioBuffer enhance_offline(const Model& model,
                                 const dsp::AudioBuffer& noisy,
                                 const dsp::AudioBuffer& enroll,
                                 const SpeakerEmbedding& emb,
                                 dsp::AudioBuffer* stage1_out) {
  const ModelConfig& cfg = model.config();
  check(noisy.sample_rate == cfg.sample_rate, "bad_sample_rate",
        "noisy sample rate must be " + std::to_string(cfg.sample_rate));
  Model::Conditioning cond = model.condition(enroll, emb);

  dsp::ComplexSpectrogram spec = dsp::stft(noisy, cfg.stft);
  const i64 t_len = spec.frames();
  const i64 bins = spec.bins();

  dsp::ComplexSpectrogram est;
  est.config = cfg.stft;
  est.real = Tensor({t_len, bins});
  est.imag = Tensor({t_len, bins});

  dsp::ComplexSpectrogram stage1;
  const bool want_stage1 = stage1_out != nullptr;
  if (want_stage1) {
    stage1.config = cfg.stft;
    stage1.real = Tensor({t_len, bins});
    stage1.imag = Tensor({t_len, bins});
  }

  Model::State st = model.make_state();
  for (i64 t = 0; t < t_len; ++t)
    model.step(st, &spec.real(t, 0), &spec.imag(t, 0), cond, &est.real(t, 0),
               &est.imag(t, 0), want_stage1 ? &stage1.real(t, 0) : nullptr,
               want_stage1 ? &stage1.imag(t, 0) : nullptr);

  dsp::AudioBuffer out = dsp::istft(est, noisy.size());
  out.sample_rate = cfg.sample_rate;
  if (want_stage1) {
    *stage1_out = dsp::istft(stage1, noisy.size());
    stage1_out->sample_rate = cfg.sample_rate;
  }
  return out;
}

}  // namespace pse::model
