// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <vector>

#include "doctest.h"
#include "pse/error.hpp"
#include "pse/loss/losses.hpp"
#include "pse/rng.hpp"

using pse::i64;
using pse::Rng;
using namespace pse::loss;
using pse::dsp::AudioBuffer;

namespace {

AudioBuffer noise(i64 n, uint64_t seed, float scale = 0.5f) {
  AudioBuffer b;
  b.samples.resize(static_cast<size_t>(n));
  Rng rng(seed);
  for (auto& v : b.samples) v = scale * rng.normal();
  return b;
}

AudioBuffer scaled(const AudioBuffer& x, float a) {
  AudioBuffer y = x;
  for (auto& v : y.samples) v *= a;
  return y;
}

}  // namespace

TEST_CASE("si-snr basics") {
  const auto ref = noise(4800, 1);
  CHECK(si_snr(ref, ref) > 80.0);

  // Scaling the estimate (even flipping its sign) leaves no residual. The
  // exact values differ through the epsilon guard, so only the magnitude of
  // the score is meaningful here.
  CHECK(si_snr(ref, scaled(ref, -2.0f)) > 80.0);

  // Hand value: ref [1,0], est [1,1] projects to a = 1, residual [0,1].
  AudioBuffer r2, e2;
  r2.samples = {1.0f, 0.0f};
  e2.samples = {1.0f, 1.0f};
  CHECK(si_snr(r2, e2) == doctest::Approx(0.0).epsilon(1e-9));

  AudioBuffer zero;
  zero.samples.assign(100, 0.0f);
  CHECK_THROWS_WITH_AS(si_snr(zero, noise(100, 2)),
                       doctest::Contains("silent"), pse::Error);
  AudioBuffer shorter;
  shorter.samples.assign(50, 0.1f);
  CHECK_THROWS_AS(si_snr(noise(100, 2), shorter), pse::Error);
}

TEST_CASE("si-snr is scale invariant within 1e-6 dB") {
  // Both the projected component and the residual need enough energy that
  // the epsilon guard stays far below them at every probe scale; a nearly
  // orthogonal or nearly perfect estimate is dominated by the guard instead.
  const auto ref = noise(4800, 3);
  AudioBuffer est = ref;
  {
    Rng rng(4);
    for (auto& v : est.samples) v = 0.8f * v + 0.3f * rng.normal();
  }
  const double base = si_snr(ref, est);
  for (float a : {0.1f, 1.0f, 10.0f}) {
    CHECK(std::abs(si_snr(ref, scaled(est, a)) - base) <= 1e-6);
  }
}

TEST_CASE("analytic si-snr gradient matches central differences") {
  const i64 n = 64;
  const auto ref = noise(n, 5, 1.0f);
  const auto est = noise(n, 6, 1.0f);

  const auto grad = si_snr_grad(ref, est);
  const auto fd = fd_gradient(
      [&](const std::vector<float>& v) {
        AudioBuffer e;
        e.samples = v;
        return -si_snr(ref, e);
      },
      est.samples, 1e-3f);

  double num = 0.0, den = 0.0;
  for (i64 i = 0; i < n; ++i) {
    const double d = double(grad[static_cast<size_t>(i)]) -
                     fd[static_cast<size_t>(i)];
    num += d * d;
    den += double(fd[static_cast<size_t>(i)]) * fd[static_cast<size_t>(i)];
  }
  CHECK(std::sqrt(num / den) <= 1e-3);
}

TEST_CASE("finite differences recover a quadratic's gradient") {
  std::vector<float> x = {0.5f, -1.25f, 2.0f};
  const auto g = fd_gradient(
      [](const std::vector<float>& v) {
        double acc = 0.0;
        for (float s : v) acc += double(s) * s;
        return acc;
      },
      x, 1e-3f);
  for (size_t i = 0; i < x.size(); ++i) {
    CHECK(g[i] == doctest::Approx(2.0 * x[i]).epsilon(1e-3));
  }
}

TEST_CASE("asymmetric term punishes only under-estimation") {
  const auto ref = noise(4800, 7);
  const auto cfg = MultiResConfig::single().scales[0];

  // Estimate magnitude >= reference everywhere: no penalty at all.
  CHECK(asym_loss(ref, scaled(ref, 2.0f), cfg, 0.3f) == 0.0);

  // Estimate strictly under: the hinge is active everywhere, so the
  // asymmetric term equals the full magnitude term bin for bin.
  const auto under = scaled(ref, 0.5f);
  const double a = asym_loss(ref, under, cfg, 0.3f);
  CHECK(a > 0.0);
  CHECK(a == mag_loss(ref, under, cfg, 0.3f));
}

TEST_CASE("composite loss: exact mean-of-scales identity") {
  const auto ref = noise(9600, 8);
  const auto est = noise(9600, 9);
  const auto multi = MultiResConfig::standard();
  REQUIRE(multi.count() == 3);

  for (CompositeKind kind : {CompositeKind::L1, CompositeKind::L2}) {
    const auto b = composite_loss(ref, est, multi, kind, 0.3f);
    REQUIRE(b.mag.size() == 3);

    double base = 0.0, phase = 0.0;
    for (int m = 0; m < 3; ++m) {
      base += b.mag[static_cast<size_t>(m)] + b.asym[static_cast<size_t>(m)];
      phase += b.pha[static_cast<size_t>(m)];
    }
    const double spectral = kind == CompositeKind::L2 ? base + phase : base;
    CHECK(b.composite == -b.si_snr + spectral / 3.0);
  }
}

TEST_CASE("the two composites differ exactly by the phase terms") {
  const auto ref = noise(4800, 10);
  const auto est = noise(4800, 11);
  const auto multi = MultiResConfig::standard();

  const auto l1 = composite_loss(ref, est, multi, CompositeKind::L1, 0.3f);
  const auto l2 = composite_loss(ref, est, multi, CompositeKind::L2, 0.3f);

  // Identical per-scale terms, identical si-snr.
  CHECK(l1.si_snr == l2.si_snr);
  for (int m = 0; m < 3; ++m) {
    CHECK(l1.mag[static_cast<size_t>(m)] == l2.mag[static_cast<size_t>(m)]);
    CHECK(l1.pha[static_cast<size_t>(m)] == l2.pha[static_cast<size_t>(m)]);
    CHECK(l1.asym[static_cast<size_t>(m)] == l2.asym[static_cast<size_t>(m)]);
  }

  // Rebuilding both composites from the shared terms shows the only
  // difference is the inclusion of the phase sum.
  double base = 0.0, phase = 0.0;
  for (int m = 0; m < 3; ++m) {
    base += l1.mag[static_cast<size_t>(m)] + l1.asym[static_cast<size_t>(m)];
    phase += l1.pha[static_cast<size_t>(m)];
  }
  CHECK(l1.composite == -l1.si_snr + base / 3.0);
  CHECK(l2.composite == -l2.si_snr + (base + phase) / 3.0);
  CHECK(l2.composite > l1.composite);  // phase terms are non-negative
}

TEST_CASE("single-resolution configuration") {
  const auto single = MultiResConfig::single();
  REQUIRE(single.count() == 1);
  CHECK(single.scales[0].fft_len == 1024);
  CHECK(single.scales[0].win_len == 960);
  CHECK(single.scales[0].hop_len == 480);
  CHECK(single.scales[0].center_pad);

  const auto ref = noise(4800, 12);
  const auto est = noise(4800, 13);
  const auto b = composite_loss(ref, est, single, CompositeKind::L2, 0.3f);
  const double want = -si_snr(ref, est) +
                      (mag_loss(ref, est, single.scales[0], 0.3f) +
                       asym_loss(ref, est, single.scales[0], 0.3f) +
                       pha_loss(ref, est, single.scales[0], 0.3f));
  CHECK(b.composite == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("standard resolutions are the documented ladder") {
  const auto multi = MultiResConfig::standard();
  REQUIRE(multi.count() == 3);
  const int ffts[] = {512, 1024, 2048};
  const int wins[] = {480, 960, 1920};
  const int hops[] = {240, 480, 960};
  for (int m = 0; m < 3; ++m) {
    CHECK(multi.scales[static_cast<size_t>(m)].fft_len == ffts[m]);
    CHECK(multi.scales[static_cast<size_t>(m)].win_len == wins[m]);
    CHECK(multi.scales[static_cast<size_t>(m)].hop_len == hops[m]);
    CHECK(multi.scales[static_cast<size_t>(m)].center_pad);
    CHECK(multi.scales[static_cast<size_t>(m)].cola());
  }
  multi.validate();

  MultiResConfig bad = multi;
  bad.scales[1].hop_len = 100;
  CHECK_THROWS_AS(bad.validate(), pse::Error);
}

TEST_CASE("perfect estimate drives every spectral term to zero") {
  const auto ref = noise(4800, 14);
  const auto cfg = MultiResConfig::single().scales[0];
  CHECK(mag_loss(ref, ref, cfg, 0.3f) == 0.0);
  CHECK(pha_loss(ref, ref, cfg, 0.3f) == 0.0);
  CHECK(asym_loss(ref, ref, cfg, 0.3f) == 0.0);
}
