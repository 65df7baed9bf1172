// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/data/mix.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "pse/dsp/fft.hpp"
#include "pse/error.hpp"

namespace pse::data {
namespace {

double mean_power(const dsp::AudioBuffer& x) {
  double acc = 0.0;
  for (float v : x.samples) acc += static_cast<double>(v) * v;
  return acc / static_cast<double>(x.size());
}

int next_pow2(i64 n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

void MixtureRecipe::validate() const {
  check(target.size() > 0, "bad_audio", "mix: target is empty");
  check(mean_power(target) > 0.0, "silent_input", "mix: target is silent");
  check(rir.size() > 0, "bad_audio", "mix: room response is empty");
  if (interferer) {
    check(interferer->size() > 0 && mean_power(*interferer) > 0.0,
          "silent_input", "mix: interferer is silent");
    check(sir_db >= -5.0 && sir_db <= 20.0, "bad_config",
          "mix: interferer ratio outside [-5, 20] dB");
  }
  if (noise) {
    check(noise->size() > 0 && mean_power(*noise) > 0.0, "silent_input",
          "mix: noise is silent");
    check(snr_db >= -5.0 && snr_db <= 20.0, "bad_config",
          "mix: noise ratio outside [-5, 20] dB");
  }
  check(output_gain > 0.0, "bad_config", "mix: gain must be positive");
}

dsp::AudioBuffer convolve(const dsp::AudioBuffer& x, const dsp::AudioBuffer& h,
                          i64 out_len) {
  check(x.size() > 0 && h.size() > 0, "bad_audio",
        "convolve: empty operand");
  const i64 full = x.size() + h.size() - 1;
  if (out_len < 0) out_len = full;
  const int n = next_pow2(full);
  const int bins = n / 2 + 1;

  std::vector<float> xb(static_cast<size_t>(n), 0.0f);
  std::vector<float> hb(static_cast<size_t>(n), 0.0f);
  std::copy(x.samples.begin(), x.samples.end(), xb.begin());
  std::copy(h.samples.begin(), h.samples.end(), hb.begin());

  std::vector<std::complex<float>> xs(static_cast<size_t>(bins));
  std::vector<std::complex<float>> hs(static_cast<size_t>(bins));
  dsp::rfft(n, xb.data(), xs.data());
  dsp::rfft(n, hb.data(), hs.data());
  for (int k = 0; k < bins; ++k) xs[static_cast<size_t>(k)] *= hs[k];

  std::vector<float> yb(static_cast<size_t>(n));
  dsp::irfft(n, xs.data(), yb.data());

  dsp::AudioBuffer out;
  out.sample_rate = x.sample_rate;
  out.samples.assign(static_cast<size_t>(out_len), 0.0f);
  const i64 copy = std::min<i64>(out_len, full);
  std::copy(yb.begin(), yb.begin() + copy, out.samples.begin());
  return out;
}

dsp::AudioBuffer loop_to_length(const dsp::AudioBuffer& x, i64 n, i64 offset) {
  check(x.size() > 0, "bad_audio", "loop: empty signal");
  check(n >= 0 && offset >= 0, "bad_config", "loop: negative length");
  dsp::AudioBuffer out;
  out.sample_rate = x.sample_rate;
  out.samples.resize(static_cast<size_t>(n));
  const i64 len = x.size();
  for (i64 i = 0; i < n; ++i) {
    out.samples[static_cast<size_t>(i)] =
        x.samples[static_cast<size_t>((offset + i) % len)];
  }
  return out;
}

std::pair<dsp::AudioBuffer, double> mix_at_snr(const dsp::AudioBuffer& target,
                                               const dsp::AudioBuffer& noise,
                                               double snr_db) {
  check(target.size() > 0 && noise.size() > 0, "bad_audio",
        "mix: empty signal");
  check(snr_db >= -60.0 && snr_db <= 60.0, "bad_config",
        "mix: ratio outside [-60, 60] dB");
  const dsp::AudioBuffer n = loop_to_length(noise, target.size(), 0);
  const double pt = mean_power(target);
  const double pn = mean_power(n);
  check(pt > 0.0, "silent_input", "mix: target is silent");
  check(pn > 0.0, "silent_input", "mix: noise is silent");

  const double scale = std::sqrt(pt / (pn * std::pow(10.0, snr_db / 10.0)));
  dsp::AudioBuffer out;
  out.sample_rate = target.sample_rate;
  out.samples.resize(target.samples.size());
  for (size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = static_cast<float>(
        static_cast<double>(target.samples[i]) + scale * n.samples[i]);
  }
  return {out, scale};
}

SynthResult synth_example(const MixtureRecipe& recipe) {
  recipe.validate();
  const i64 len = recipe.target.size();
  Rng rng(recipe.seed);

  SynthResult r;
  r.enroll = recipe.target;
  dsp::AudioBuffer rev = convolve(recipe.target, recipe.rir, len);
  const double p_rev = mean_power(rev);
  check(p_rev > 0.0, "silent_input", "mix: reverberant target is silent");

  std::vector<double> sum(static_cast<size_t>(len));
  for (i64 i = 0; i < len; ++i) {
    sum[static_cast<size_t>(i)] = rev.samples[static_cast<size_t>(i)];
  }

  auto lay_in = [&](const dsp::AudioBuffer& src, double ratio_db,
                    dsp::AudioBuffer* kept) {
    const i64 offset = static_cast<i64>(rng.below(
        static_cast<uint32_t>(std::min<i64>(src.size(), 0x7fffffff))));
    dsp::AudioBuffer looped = loop_to_length(src, len, offset);
    const double scale =
        std::sqrt(p_rev / (mean_power(looped) *
                           std::pow(10.0, ratio_db / 10.0)));
    kept->sample_rate = rev.sample_rate;
    kept->samples.resize(static_cast<size_t>(len));
    for (i64 i = 0; i < len; ++i) {
      const double v = scale * looped.samples[static_cast<size_t>(i)];
      kept->samples[static_cast<size_t>(i)] = static_cast<float>(v);
      sum[static_cast<size_t>(i)] += v;
    }
  };

  if (recipe.interferer) {
    lay_in(*recipe.interferer, recipe.sir_db, &r.scaled_interferer);
  }
  if (recipe.noise) {
    lay_in(*recipe.noise, recipe.snr_db, &r.scaled_noise);
  }

  double peak = 0.0;
  for (double v : sum) peak = std::max(peak, std::abs(v));
  double gain = recipe.output_gain;
  if (peak * gain > 0.99) gain = 0.99 / peak;
  r.gain = gain;

  auto apply_gain = [&](dsp::AudioBuffer* buf) {
    for (float& v : buf->samples) {
      v = static_cast<float>(static_cast<double>(v) * gain);
    }
  };

  r.noisy.sample_rate = rev.sample_rate;
  r.noisy.samples.resize(static_cast<size_t>(len));
  for (i64 i = 0; i < len; ++i) {
    r.noisy.samples[static_cast<size_t>(i)] =
        static_cast<float>(sum[static_cast<size_t>(i)] * gain);
  }
  r.clean = rev;
  apply_gain(&r.clean);
  if (recipe.interferer) apply_gain(&r.scaled_interferer);
  if (recipe.noise) apply_gain(&r.scaled_noise);
  return r;
}

}  // namespace pse::data
