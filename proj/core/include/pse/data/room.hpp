// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>

#include "pse/dsp/stft.hpp"

namespace pse::data {

using pse::i64;

struct RoomSpec {
  std::array<double, 3> dims = {6.0, 5.0, 3.0};  // meters
  std::array<double, 3> src = {2.0, 1.5, 1.2};
  std::array<double, 3> mic = {4.0, 3.5, 1.6};
  double rt60_target = 0.5;  // seconds
  int sample_rate = 48000;
  i64 rir_len = 48000;
  double sound_speed = 343.0;  // m/s

  double volume() const { return dims[0] * dims[1] * dims[2]; }
  double surface() const {
    return 2.0 * (dims[0] * dims[1] + dims[0] * dims[2] + dims[1] * dims[2]);
  }
  void validate() const;
};

// Uniform wall reflection coefficient from the Sabine relation
// alpha = 0.161 V / (S T), beta = sqrt(1 - alpha). Fails when the target
// would need more than total absorption. Measured decay of responses built
// with this inversion lands nearest the target: the extra absorption it
// assigns (relative to Eyring) offsets the slow grazing-path tail of the
// specular image field.
double rt60_to_reflection(const RoomSpec& room);

// Variant solved from the Eyring relation alpha = 1 - exp(-0.161 V / (S T)).
// Under an ideal exponential-decay model this reproduces the target time
// exactly, and beta never reaches zero, so the synthesis pipeline uses it
// when sampling targets that the Sabine inversion rejects as infeasible.
double rt60_to_reflection_eyring(const RoomSpec& room);

// Shoebox impulse response by the image-source method with a uniform
// reflection coefficient. Fractional delays use an 81-tap Hann-windowed
// sinc; amplitudes follow beta^order / (4 pi d). max_order < 0 derives the
// per-axis image counts from the response length.
dsp::AudioBuffer simulate_rir(const RoomSpec& room, double beta,
                              int max_order = -1);

// Reverberation time from backward-integrated energy: a line is fit to the
// -5..-25 dB span of the decay curve and extrapolated to -60 dB. A response
// whose energy collapses within a few samples reports a time near zero.
// Condition one-signed synthetic responses with dsp::dc_block first; their
// low-frequency pedestal otherwise reads as late energy and stretches the
// fit.
double estimate_rt60(const dsp::AudioBuffer& rir);

}  // namespace pse::data
