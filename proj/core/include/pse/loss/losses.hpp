// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <functional>
#include <vector>

#include "pse/dsp/stft.hpp"

namespace pse::loss {

using pse::i64;

struct MultiResConfig {
  std::vector<dsp::StftConfig> scales;

  // Three resolutions: FFT {512, 1024, 2048}, window {480, 960, 1920},
  // hop {240, 480, 960}; centered framing so every sample is covered.
  static MultiResConfig standard();
  // Single resolution 1024/960/480.
  static MultiResConfig single();

  void validate() const;
  int count() const { return static_cast<int>(scales.size()); }
};

enum class CompositeKind { L1, L2 };

struct LossBreakdown {
  double si_snr = 0.0;  // dB; the loss contribution is its negation
  std::vector<double> mag;
  std::vector<double> pha;
  std::vector<double> asym;
  double composite = 0.0;
  CompositeKind which = CompositeKind::L1;
};

// Scale-invariant SNR in dB (higher is better).
double si_snr(const dsp::AudioBuffer& ref, const dsp::AudioBuffer& est);

// Analytic gradient of the negated SI-SNR with respect to the estimate.
std::vector<float> si_snr_grad(const dsp::AudioBuffer& ref,
                               const dsp::AudioBuffer& est);

// Spectral terms: mean over all time-frequency bins of the squared
// compressed-magnitude difference, squared compressed-complex difference,
// and the one-sided (under-estimation only) hinge respectively.
double mag_loss(const dsp::AudioBuffer& ref, const dsp::AudioBuffer& est,
                const dsp::StftConfig& cfg, float c);
double pha_loss(const dsp::AudioBuffer& ref, const dsp::AudioBuffer& est,
                const dsp::StftConfig& cfg, float c);
double asym_loss(const dsp::AudioBuffer& ref, const dsp::AudioBuffer& est,
                 const dsp::StftConfig& cfg, float c);

// L1 = -si_snr + mean_m(mag_m + asym_m);
// L2 = -si_snr + mean_m(mag_m + pha_m + asym_m).
LossBreakdown composite_loss(const dsp::AudioBuffer& ref,
                             const dsp::AudioBuffer& est,
                             const MultiResConfig& multi, CompositeKind which,
                             float c);

// Central finite differences of an arbitrary scalar function of the samples.
std::vector<float> fd_gradient(
    const std::function<double(const std::vector<float>&)>& fn,
    const std::vector<float>& x, float h);

}  // namespace pse::loss
