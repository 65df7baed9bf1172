// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "pse/dsp/fft.hpp"
#include "pse/dsp/stft.hpp"
#include "pse/error.hpp"
#include "pse/rng.hpp"

using pse::Rng;
using namespace pse::dsp;

namespace {

AudioBuffer noise(pse::i64 n, uint64_t seed, float scale = 0.1f) {
  AudioBuffer b;
  b.samples.resize(static_cast<size_t>(n));
  Rng rng(seed);
  for (auto& v : b.samples) v = scale * rng.normal();
  return b;
}

// O(n^2) reference DFT in double precision.
std::vector<std::complex<double>> dft(const std::vector<float>& x) {
  const size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double ph = -2.0 * M_PI * static_cast<double>(k * i) /
                        static_cast<double>(n);
      acc += static_cast<double>(x[i]) *
             std::complex<double>(std::cos(ph), std::sin(ph));
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("rfft matches the direct DFT") {
  for (int n : {16, 64, 960}) {
    Rng rng(static_cast<uint64_t>(n));
    std::vector<float> x(static_cast<size_t>(n));
    for (auto& v : x) v = rng.normal();
    std::vector<std::complex<float>> got(static_cast<size_t>(n / 2 + 1));
    rfft(n, x.data(), got.data());
    const auto want = dft(x);
    double worst = 0.0;
    for (size_t k = 0; k < want.size(); ++k) {
      worst = std::max(worst, std::abs(std::complex<double>(got[k]) - want[k]));
    }
    CHECK(worst < 1e-3 * std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("irfft inverts rfft") {
  const int n = 960;
  Rng rng(3);
  std::vector<float> x(n);
  for (auto& v : x) v = rng.normal();
  std::vector<std::complex<float>> spec(n / 2 + 1);
  std::vector<float> back(n);
  rfft(n, x.data(), spec.data());
  irfft(n, spec.data(), back.data());
  for (int i = 0; i < n; ++i) {
    CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-4));
  }
  // The spectrum operand must survive the inverse call.
  std::vector<std::complex<float>> spec2(n / 2 + 1);
  rfft(n, x.data(), spec2.data());
  for (int k = 0; k <= n / 2; ++k) CHECK(spec[k] == spec2[k]);
}

TEST_CASE("periodic hann window") {
  const auto w = hann_window(960);
  CHECK(w.size() == 960);
  CHECK(w[0] == 0.0f);
  CHECK(w[480] == doctest::Approx(1.0).epsilon(1e-7));
  for (int k = 1; k < 960; ++k) {
    CHECK(w[k] == doctest::Approx(w[960 - k]).epsilon(1e-6));
  }
  // At 50% overlap the shifted copies tile to a constant (sin^2 + cos^2),
  // which is what makes the overlap-add denominator well conditioned.
  for (int k = 0; k < 480; ++k) {
    const double s = static_cast<double>(w[k]) + w[k + 480];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("stft shapes") {
  StftConfig cfg;  // 960/960/480
  const auto spec = stft(noise(4800, 1), cfg);
  CHECK(spec.frames() == 9);
  CHECK(spec.bins() == 481);

  StftConfig big;
  big.fft_len = 1024;
  big.win_len = 960;
  big.hop_len = 480;
  CHECK(big.bins() == 513);
  const auto spec2 = stft(noise(4800, 1), big);
  CHECK(spec2.bins() == 513);

  StftConfig padded = cfg;
  padded.center_pad = true;
  const auto spec3 = stft(noise(4800, 1), padded);
  CHECK(spec3.frames() == (4800 + 2 * 960 - 960) / 480 + 1);
}

TEST_CASE("stft rejects bad input") {
  StftConfig cfg;
  CHECK_THROWS_WITH_AS(stft(AudioBuffer{}, cfg), doctest::Contains("empty"),
                       pse::Error);
  CHECK_THROWS_AS(stft(noise(100, 1), cfg), pse::Error);  // shorter than win

  StftConfig bad;
  bad.hop_len = 0;
  CHECK_THROWS_AS(bad.validate(), pse::Error);
  bad = StftConfig{};
  bad.win_len = 1000;  // exceeds fft_len
  CHECK_THROWS_AS(bad.validate(), pse::Error);
}

TEST_CASE("a pure tone lands in its bin") {
  // Bin 20 of a 960-point transform at 48 kHz is exactly 1000 Hz.
  AudioBuffer tone;
  tone.samples.resize(4800);
  for (size_t i = 0; i < tone.samples.size(); ++i) {
    tone.samples[i] = std::sin(2.0 * M_PI * 1000.0 * static_cast<double>(i) /
                               48000.0);
  }
  const auto spec = stft(tone, StftConfig{});
  const auto mag = magnitude(spec);
  for (pse::i64 t = 0; t < spec.frames(); ++t) {
    pse::i64 peak = 0;
    for (pse::i64 k = 1; k < spec.bins(); ++k) {
      if (mag(t, k) > mag(t, peak)) peak = k;
    }
    CHECK(peak == 20);
  }
}

TEST_CASE("istft reconstructs under 50% hann overlap") {
  const auto x = noise(4800, 7);

  SUBCASE("centered framing recovers every sample") {
    StftConfig cfg;
    cfg.center_pad = true;
    const auto rec = istft(stft(x, cfg), x.size());
    REQUIRE(rec.size() == x.size());
    for (pse::i64 i = 0; i < x.size(); ++i) {
      CHECK(std::abs(rec.samples[static_cast<size_t>(i)] -
                     x.samples[static_cast<size_t>(i)]) < 1e-5);
    }
  }

  SUBCASE("uncentered framing recovers everything after sample 0") {
    StftConfig cfg;  // center_pad = false
    const auto rec = istft(stft(x, cfg), x.size());
    REQUIRE(rec.size() == x.size());
    CHECK(rec.samples[0] == 0.0f);  // zero window weight at the first sample
    // The first and last half window are covered by a single frame, so the
    // overlap-add normalizer there is w^2 with w vanishing toward the edge;
    // transform rounding is amplified by 1/w and only a looser bound holds.
    // Full double coverage starts one hop in and ends one hop early.
    for (pse::i64 i = 1; i < x.size(); ++i) {
      const bool ramp = i < 480 || i >= x.size() - 480;
      CHECK(std::abs(rec.samples[static_cast<size_t>(i)] -
                     x.samples[static_cast<size_t>(i)]) <
            (ramp ? 1e-3 : 1e-5));
    }
  }

  SUBCASE("output length is trimmed or zero-extended") {
    StftConfig cfg;
    cfg.center_pad = true;
    const auto spec = stft(x, cfg);
    CHECK(istft(spec, 1000).size() == 1000);
    const auto longer = istft(spec, 6000);
    CHECK(longer.size() == 6000);
    for (pse::i64 i = 5500; i < 6000; ++i) {
      CHECK(longer.samples[static_cast<size_t>(i)] == 0.0f);
    }
  }
}

TEST_CASE("istft requires an exact-reconstruction window layout") {
  StftConfig cfg;
  cfg.fft_len = 960;
  cfg.win_len = 960;
  cfg.hop_len = 320;  // 2/3 overlap: not the supported layout
  const auto spec = stft(noise(4800, 9), cfg);
  CHECK_THROWS_WITH_AS(istft(spec, 4800), doctest::Contains("reconstruction"),
                       pse::Error);
}

TEST_CASE("power-law compression") {
  const auto spec = stft(noise(4800, 11), StftConfig{});
  const auto mag = magnitude(spec);
  const float c = 0.3f;
  const auto comp = power_law_compress(spec, c);

  for (pse::i64 i = 0; i < mag.size(); ++i) {
    const float m = mag[i];
    CHECK(comp.mag_c[i] ==
          doctest::Approx(std::pow(m, c)).epsilon(1e-4));
    // Compression keeps the phase: compressed complex magnitude == mag_c.
    const double cr = comp.complex_c.real[i];
    const double ci = comp.complex_c.imag[i];
    CHECK(std::sqrt(cr * cr + ci * ci) ==
          doctest::Approx(comp.mag_c[i]).epsilon(1e-4));
  }

  CHECK_THROWS_AS(power_law_compress(spec, 0.0f), pse::Error);
  CHECK_THROWS_AS(power_law_compress(spec, 1.5f), pse::Error);

  // c = 1 is the identity.
  const auto ident = power_law_compress(spec, 1.0f);
  for (pse::i64 i = 0; i < spec.real.size(); ++i) {
    CHECK(ident.complex_c.real[i] ==
          doctest::Approx(spec.real[i]).epsilon(1e-5));
  }

  // Zero input stays zero instead of dividing 0 by 0.
  AudioBuffer silent;
  silent.samples.assign(4800, 0.0f);
  const auto zc = power_law_compress(stft(silent, StftConfig{}), c);
  for (pse::i64 i = 0; i < zc.mag_c.size(); ++i) {
    CHECK(zc.mag_c[i] == 0.0f);
    CHECK(zc.complex_c.real[i] == 0.0f);
  }
}

TEST_CASE("magnitude") {
  const auto spec = stft(noise(2880, 13), StftConfig{});
  const auto mag = magnitude(spec);
  REQUIRE(mag.rank() == 2);
  CHECK(mag.dim(0) == spec.frames());
  CHECK(mag.dim(1) == spec.bins());
  for (pse::i64 i = 0; i < mag.size(); ++i) {
    const double r = spec.real[i];
    const double im = spec.imag[i];
    CHECK(mag[i] == doctest::Approx(std::sqrt(r * r + im * im)).epsilon(1e-6));
  }
}
