// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>

namespace pse::dsp {

// Real-input FFT, n real samples in -> n/2+1 complex bins out.
// Plans are cached per size; safe to call from multiple threads.
void rfft(int n, const float* in, std::complex<float>* out);

// Inverse of rfft, normalized by 1/n. Input buffer is not modified.
void irfft(int n, const std::complex<float>* in, float* out);

}  // namespace pse::dsp
