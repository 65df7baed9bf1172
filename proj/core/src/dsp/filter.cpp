// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/dsp/filter.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include "pse/error.hpp"

namespace pse::dsp {
namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

AudioBuffer dc_block(const AudioBuffer& audio, double cutoff_hz, int passes) {
  check(audio.sample_rate > 0, "bad_audio",
        "dc_block: sample rate must be positive");
  check(cutoff_hz > 0.0 && cutoff_hz < 0.5 * audio.sample_rate, "bad_config",
        "dc_block: cutoff must lie in (0, fs/2)");
  check(passes > 0, "bad_config", "dc_block: passes must be positive");

  const double r = std::exp(-2.0 * kPi * cutoff_hz / audio.sample_rate);
  std::vector<double> x(audio.samples.begin(), audio.samples.end());
  for (int pass = 0; pass < passes; ++pass) {
    double prev_x = 0.0;
    double prev_y = 0.0;
    for (double& v : x) {
      const double y = v - prev_x + r * prev_y;
      prev_x = v;
      prev_y = y;
      v = y;
    }
  }

  AudioBuffer out;
  out.sample_rate = audio.sample_rate;
  out.samples.resize(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    out.samples[i] = static_cast<float>(x[i]);
  }
  return out;
}

}  // namespace pse::dsp
