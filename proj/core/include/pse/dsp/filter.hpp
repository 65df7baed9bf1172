// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "pse/dsp/stft.hpp"

namespace pse::dsp {

// Cascade of first-order DC blockers y[n] = x[n] - x[n-1] + R y[n-1] with
// R = exp(-2 pi cutoff / fs). Removes the constant and sub-cutoff content
// while leaving the band above the cutoff essentially untouched.
//
// Impulse responses assembled from one-signed arrivals (image-method room
// responses, for instance) carry a low-frequency pedestal that backward
// energy integration reads as slowly decaying late energy; condition such
// responses with this blocker before measuring their decay.
AudioBuffer dc_block(const AudioBuffer& audio, double cutoff_hz,
                     int passes = 1);

}  // namespace pse::dsp
