// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/loss/losses.hpp"

#include <cmath>
#include <cstddef>

#include "pse/error.hpp"

namespace pse::loss {
namespace {

constexpr double kEps = 1e-8;

struct SiSnrParts {
  double a = 0.0;      // projection coefficient <est, ref> / <ref, ref>
  double st2 = 0.0;    // energy of the target component
  double e2 = 0.0;     // energy of the residual
  double value = 0.0;  // SI-SNR in dB
};

SiSnrParts si_snr_parts(const dsp::AudioBuffer& ref,
                        const dsp::AudioBuffer& est) {
  check(ref.size() == est.size() && ref.size() > 0, "bad_shape",
        "si_snr: signals must be non-empty and equal length");
  const i64 n = ref.size();
  double dot_rr = 0.0, dot_re = 0.0, dot_ee = 0.0;
  for (i64 i = 0; i < n; ++i) {
    const double r = ref.samples[static_cast<size_t>(i)];
    const double e = est.samples[static_cast<size_t>(i)];
    dot_rr += r * r;
    dot_re += r * e;
    dot_ee += e * e;
  }
  check(dot_rr > 0.0, "zero_reference", "si_snr: reference signal is silent");

  SiSnrParts p;
  p.a = dot_re / dot_rr;
  p.st2 = p.a * p.a * dot_rr;
  p.e2 = dot_ee - 2.0 * p.a * dot_re + p.a * p.a * dot_rr;
  if (p.e2 < 0.0) p.e2 = 0.0;
  p.value = 10.0 * std::log10((p.st2 + kEps) / (p.e2 + kEps));
  return p;
}

double bin_mean(const dsp::AudioBuffer& ref, const dsp::AudioBuffer& est,
                const dsp::StftConfig& cfg, float c, int which) {
  check(ref.size() == est.size() && ref.size() > 0, "bad_shape",
        "loss: signals must be non-empty and equal length");
  const auto sr = dsp::stft(ref, cfg);
  const auto se = dsp::stft(est, cfg);
  const auto cr = dsp::power_law_compress(sr, c);
  const auto ce = dsp::power_law_compress(se, c);

  const i64 count = cr.mag_c.size();
  double acc = 0.0;
  for (i64 i = 0; i < count; ++i) {
    switch (which) {
      case 0: {  // magnitude
        const double d = static_cast<double>(cr.mag_c[i]) - ce.mag_c[i];
        acc += d * d;
        break;
      }
      case 1: {  // complex (carries the phase)
        const double dr =
            static_cast<double>(cr.complex_c.real[i]) - ce.complex_c.real[i];
        const double di =
            static_cast<double>(cr.complex_c.imag[i]) - ce.complex_c.imag[i];
        acc += dr * dr + di * di;
        break;
      }
      default: {  // one-sided: penalize only under-estimated magnitude
        const double d = static_cast<double>(cr.mag_c[i]) - ce.mag_c[i];
        if (d > 0.0) acc += d * d;
        break;
      }
    }
  }
  return acc / static_cast<double>(count);
}

}  // namespace

MultiResConfig MultiResConfig::standard() {
  MultiResConfig m;
  for (int s : {0, 1, 2}) {
    dsp::StftConfig cfg;
    cfg.fft_len = 512 << s;
    cfg.win_len = 480 << s;
    cfg.hop_len = 240 << s;
    cfg.center_pad = true;
    m.scales.push_back(cfg);
  }
  return m;
}

MultiResConfig MultiResConfig::single() {
  MultiResConfig m;
  dsp::StftConfig cfg;
  cfg.fft_len = 1024;
  cfg.win_len = 960;
  cfg.hop_len = 480;
  cfg.center_pad = true;
  m.scales.push_back(cfg);
  return m;
}

void MultiResConfig::validate() const {
  check(!scales.empty(), "bad_config", "loss: no resolutions configured");
  for (const auto& cfg : scales) {
    cfg.validate();
    check(cfg.cola(), "bad_config",
          "loss: every resolution must use a 50% overlap Hann window");
  }
}

double si_snr(const dsp::AudioBuffer& ref, const dsp::AudioBuffer& est) {
  return si_snr_parts(ref, est).value;
}

std::vector<float> si_snr_grad(const dsp::AudioBuffer& ref,
                               const dsp::AudioBuffer& est) {
  const SiSnrParts p = si_snr_parts(ref, est);
  const i64 n = ref.size();
  const double k = 10.0 / std::log(10.0);
  std::vector<float> g(static_cast<size_t>(n));
  for (i64 i = 0; i < n; ++i) {
    const double r = ref.samples[static_cast<size_t>(i)];
    const double e = est.samples[static_cast<size_t>(i)] - p.a * r;
    const double d =
        2.0 * p.a * r / (p.st2 + kEps) - 2.0 * e / (p.e2 + kEps);
    g[static_cast<size_t>(i)] = static_cast<float>(-k * d);
  }
  return g;
}

double mag_loss(const dsp::AudioBuffer& ref, const dsp::AudioBuffer& est,
                const dsp::StftConfig& cfg, float c) {
  return bin_mean(ref, est, cfg, c, 0);
}

double pha_loss(const dsp::AudioBuffer& ref, const dsp::AudioBuffer& est,
                const dsp::StftConfig& cfg, float c) {
  return bin_mean(ref, est, cfg, c, 1);
}

double asym_loss(const dsp::AudioBuffer& ref, const dsp::AudioBuffer& est,
                 const dsp::StftConfig& cfg, float c) {
  return bin_mean(ref, est, cfg, c, 2);
}

LossBreakdown composite_loss(const dsp::AudioBuffer& ref,
                             const dsp::AudioBuffer& est,
                             const MultiResConfig& multi, CompositeKind which,
                             float c) {
  multi.validate();
  LossBreakdown b;
  b.which = which;
  b.si_snr = si_snr(ref, est);

  double base = 0.0;
  double phase = 0.0;
  for (const auto& cfg : multi.scales) {
    const double m = mag_loss(ref, est, cfg, c);
    const double p = pha_loss(ref, est, cfg, c);
    const double a = asym_loss(ref, est, cfg, c);
    b.mag.push_back(m);
    b.pha.push_back(p);
    b.asym.push_back(a);
    base += m + a;
    phase += p;
  }
  const double spectral = which == CompositeKind::L2 ? base + phase : base;
  b.composite = -b.si_snr + spectral / static_cast<double>(multi.count());
  return b;
}

std::vector<float> fd_gradient(
    const std::function<double(const std::vector<float>&)>& fn,
    const std::vector<float>& x, float h) {
  check(h > 0.0f, "bad_config", "fd_gradient: step must be positive");
  std::vector<float> g(x.size());
  std::vector<float> probe = x;
  for (size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = fn(probe);
    probe[i] = x[i] - h;
    const double down = fn(probe);
    probe[i] = x[i];
    g[i] = static_cast<float>((up - down) / (2.0 * static_cast<double>(h)));
  }
  return g;
}

}  // namespace pse::loss
