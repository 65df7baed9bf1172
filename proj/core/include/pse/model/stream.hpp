// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <vector>

#include "pse/model/model.hpp"

namespace pse::model {

// Frame-by-frame inference session. Each push takes exactly one hop of input
// samples and returns one hop of output, delayed by win_len - hop_len samples
// relative to the offline path; the first push therefore returns zeros and
// flush() emits the final trailing hop. Output matches enhance_offline
// sample-for-sample (shifted by the latency).
class StreamSession {
 public:
  StreamSession(const Model& model, const dsp::AudioBuffer& enroll,
                const SpeakerEmbedding& emb);

  int hop() const { return hop_; }
  int latency() const { return win_ - hop_; }

  std::vector<float> push(const std::vector<float>& samples);
  std::vector<float> flush();

  // Returns to the post-enrollment initial state; the cached speaker
  // conditioning is kept.
  void reset();

 private:
  const Model& model_;
  Model::Conditioning cond_;
  Model::State state_;

  int win_ = 0;
  int hop_ = 0;
  int fft_ = 0;
  std::vector<float> window_;
  std::vector<double> den_first_;   // window-power sum, first emitted block
  std::vector<double> den_steady_;  // window-power sum, interior blocks
  std::vector<double> den_last_;    // window-power sum, flushed tail block

  std::vector<float> pending_;    // buffered input, most recent win samples
  std::vector<double> ola_tail_;  // carried synthesis overlap (hop samples)
  i64 frames_done_ = 0;
  i64 pushes_ = 0;
  bool flushed_ = false;
};

}  // namespace pse::model
