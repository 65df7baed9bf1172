// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <optional>
#include <utility>

#include "pse/dsp/stft.hpp"
#include "pse/rng.hpp"

namespace pse::data {

using pse::i64;

struct MixtureRecipe {
  dsp::AudioBuffer target;                       // dry target speech
  dsp::AudioBuffer rir;                          // target room response
  std::optional<dsp::AudioBuffer> interferer;    // competing speech
  std::optional<dsp::AudioBuffer> noise;
  double snr_db = 5.0;   // target vs. noise
  double sir_db = 5.0;   // target vs. interferer
  double output_gain = 1.0;
  uint64_t seed = 0;

  void validate() const;
};

struct SynthResult {
  dsp::AudioBuffer noisy;
  dsp::AudioBuffer clean;    // reverberant target after output gain
  dsp::AudioBuffer enroll;   // dry target, ungained
  dsp::AudioBuffer scaled_interferer;
  dsp::AudioBuffer scaled_noise;
  double gain = 1.0;
};

// FFT-based linear convolution, truncated or zero-extended to out_len
// (out_len < 0 keeps the full length).
dsp::AudioBuffer convolve(const dsp::AudioBuffer& x, const dsp::AudioBuffer& h,
                          i64 out_len = -1);

// Circularly tile x starting at `offset` until n samples are produced.
dsp::AudioBuffer loop_to_length(const dsp::AudioBuffer& x, i64 n, i64 offset);

// Scale `noise` so that the power ratio against `target` is exactly snr_db,
// then add. Returns the mixture and the noise scale that was applied.
std::pair<dsp::AudioBuffer, double> mix_at_snr(const dsp::AudioBuffer& target,
                                               const dsp::AudioBuffer& noise,
                                               double snr_db);

// Full example synthesis: reverberate the target, lay in the optional
// interferer and noise at the requested ratios (loop offsets drawn from the
// recipe seed), then apply a common gain that keeps the mixture peak at or
// below 0.99.
SynthResult synth_example(const MixtureRecipe& recipe);

}  // namespace pse::data
