// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pse/dsp/stft.hpp"
#include "pse/model/config.hpp"
#include "pse/model/registry.hpp"
#include "pse/nn/layers.hpp"
#include "pse/rng.hpp"
#include "pse/tensor.hpp"

namespace pse::model {

struct SpeakerEmbedding {
  std::vector<float> e;
};

// Pooled per-level enrollment features plus the projected embedding gate for
// one stage.
struct SpeakerFeatures {
  std::vector<std::vector<float>> levels;
  std::vector<float> gate;
};

// Enrollment branch: BLSTM over the magnitude spectrogram, a dense layer back
// to the bin count, then a chain of single-channel down-sampling blocks whose
// outputs are time-averaged into one frequency profile per level.
class SpeakerEncoder {
 public:
  SpeakerEncoder() = default;
  explicit SpeakerEncoder(const ModelConfig& cfg);

  void init(Rng& rng);

  std::vector<std::vector<float>> forward(const Tensor& enroll_mag) const;

  struct Level {
    nn::GConv2d conv;
    nn::CumLayerNorm cln;
    nn::PReLU act;
  };

  nn::Blstm blstm;
  nn::Dense dense;
  std::vector<Level> levels;
  std::vector<i64> level_freqs;  // output F per level

 private:
  int bins_ = 0;
};

// Frequency down-sampling block: gated conv + cumulative norm + PReLU.
struct FdBlock {
  nn::GConv2d conv;
  nn::CumLayerNorm cln;
  nn::PReLU act;

  struct State {
    nn::GConv2d::State conv;
    nn::CumLayerNorm::State cln;
  };
  State make_state(i64 f_in) const;
  Tensor step(State& st, const Tensor& x) const;
};

// Frequency up-sampling block: transposed gated conv + cumulative norm + PReLU.
struct FuBlock {
  nn::TrGConv2d conv;
  nn::CumLayerNorm cln;
  nn::PReLU act;

  struct State {
    nn::TrGConv2d::State conv;
    nn::CumLayerNorm::State cln;
  };
  State make_state(i64 f_in) const;
  Tensor step(State& st, const Tensor& x) const;
};

// 1x1 conv over channels producing one plane.
struct Head {
  Tensor w;  // [C]
  Tensor b;  // [1]
  std::vector<float> apply(const Tensor& frame) const;  // [C,F] -> [F]
};

// A group of temporal blocks followed by a residual unidirectional LSTM.
// The speaker gate multiplies the first block's input.
class StcnlGroup {
 public:
  StcnlGroup() = default;
  StcnlGroup(int dim, int channels, int kernel,
             const std::vector<int>& dilations);

  void init(Rng& rng);

  struct State {
    std::vector<nn::Stcm::State> stcms;
    nn::Lstm::State lstm;
    std::vector<float> scratch;
  };
  State make_state() const;

  std::vector<float> step(State& st, const std::vector<float>& x,
                          const std::vector<float>* gate) const;

  std::vector<nn::Stcm> stcms;
  nn::Lstm lstm;
};

// One full stage: encoder, temporal stack, and one or more decoders, each
// ending in a single-plane head.
class StageNet {
 public:
  StageNet() = default;
  StageNet(const ModelConfig& cfg, int in_channels, int n_decoders,
           bool sigmoid_head);

  void init(Rng& rng);

  struct State {
    std::vector<FdBlock::State> fd;
    std::vector<StcnlGroup::State> groups;
    std::vector<std::vector<FuBlock::State>> decoders;
  };
  State make_state() const;

  // in_frame: [in_channels, bins]. Returns one [bins] plane per decoder.
  std::vector<std::vector<float>> step(State& st, const Tensor& in_frame,
                                       const SpeakerFeatures& spk) const;

  int in_channels() const { return in_channels_; }
  int n_decoders() const { return static_cast<int>(decoders.size()); }

  std::vector<FdBlock> fd;
  std::vector<StcnlGroup> groups;
  std::vector<std::vector<FuBlock>> decoders;
  std::vector<Head> heads;

 private:
  int in_channels_ = 0;
  bool sigmoid_head_ = false;
  std::vector<i64> freqs_;  // [bins, F1, .., F_n]
  int channels_ = 0;
};

// Two-stage enhancement model: a magnitude masking stage followed by a
// complex residual refinement stage, each conditioned on enrollment features
// and a speaker embedding.
class Model {
 public:
  static std::unique_ptr<Model> build(const ModelConfig& cfg,
                                      std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  ParameterRegistry& registry() { return registry_; }
  const ParameterRegistry& registry() const { return registry_; }

  struct Conditioning {
    SpeakerFeatures mag;
    SpeakerFeatures com;
  };

  // Runs both speaker encoders on enrollment audio and projects the embedding.
  Conditioning condition(const dsp::AudioBuffer& enroll,
                         const SpeakerEmbedding& emb) const;
  Conditioning condition_from_mag(const Tensor& enroll_mag,
                                  const SpeakerEmbedding& emb) const;

  struct State {
    StageNet::State mag;
    StageNet::State com;
  };
  State make_state() const;

  // One spectral frame through both stages. stage1_* are optional taps on the
  // first-stage spectrum (masked magnitude under the noisy phase).
  void step(State& st, const float* noisy_re, const float* noisy_im,
            const Conditioning& cond, float* out_re, float* out_im,
            float* stage1_re = nullptr, float* stage1_im = nullptr) const;

  // Offline stage wrappers (frame loops over the shared step kernels).
  Tensor magnet_forward(const Tensor& noisy_mag,
                        const SpeakerFeatures& spk) const;
  dsp::ComplexSpectrogram comnet_forward(const dsp::ComplexSpectrogram& noisy,
                                         const dsp::ComplexSpectrogram& stage1,
                                         const SpeakerFeatures& spk) const;

  ModelConfig cfg_;
  StageNet mag_stage;
  StageNet com_stage;
  SpeakerEncoder spk_mag;
  SpeakerEncoder spk_com;
  nn::Dense fusion_mag;  // embedding_dim -> bottleneck
  nn::Dense fusion_com;

 private:
  Model() = default;
  void register_params();

  ParameterRegistry registry_;
};

// Full offline enhancement. Output length equals the noisy input length.
// When stage1_out is given it receives the first-stage waveform.
dsp::AudioBuffer enhance_offline(const Model& model,
                                 const dsp::AudioBuffer& noisy,
                                 const dsp::AudioBuffer& enroll,
                                 const SpeakerEmbedding& emb,
                                 dsp::AudioBuffer* stage1_out = nullptr);

}  // namespace pse::model
