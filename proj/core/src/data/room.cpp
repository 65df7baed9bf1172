// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/data/room.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include "pse/error.hpp"

namespace pse::data {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kSincHalf = 40;  // 81-tap interpolation kernel

double sabine_alpha(const RoomSpec& room) {
  return 0.161 * room.volume() / (room.surface() * room.rt60_target);
}

// Hann-windowed sinc centered on a fractional delay; exact for integer u.
double frac_tap(double u) {
  if (std::abs(u) > kSincHalf + 0.5) return 0.0;
  const double w = 0.5 * (1.0 + std::cos(kPi * u / (kSincHalf + 0.5)));
  if (u == 0.0) return w;
  return w * std::sin(kPi * u) / (kPi * u);
}

}  // namespace

void RoomSpec::validate() const {
  for (int i = 0; i < 3; ++i) {
    check(dims[i] > 0.0, "bad_config", "room: dimensions must be positive");
    check(src[i] > 0.0 && src[i] < dims[i], "bad_config",
          "room: source must lie strictly inside the room");
    check(mic[i] > 0.0 && mic[i] < dims[i], "bad_config",
          "room: microphone must lie strictly inside the room");
  }
  check(!(src == mic), "bad_config",
        "room: source and microphone must not coincide");
  check(rt60_target >= 0.1 && rt60_target <= 1.0, "bad_config",
        "room: reverberation target outside [0.1, 1.0] s");
  check(sample_rate > 0, "bad_config", "room: sample rate must be positive");
  check(rir_len > 0, "bad_config", "room: response length must be positive");
  check(sound_speed > 0.0, "bad_config",
        "room: sound speed must be positive");
}

double rt60_to_reflection(const RoomSpec& room) {
  check(room.rt60_target > 0.0, "bad_config",
        "room: reverberation target must be positive");
  const double alpha = sabine_alpha(room);
  check(alpha <= 1.0 + 1e-9, "infeasible_rt60",
        "required absorption exceeds total surface absorption");
  if (alpha >= 1.0) return 0.0;
  return std::sqrt(1.0 - alpha);
}

double rt60_to_reflection_eyring(const RoomSpec& room) {
  check(room.rt60_target > 0.0, "bad_config",
        "room: reverberation target must be positive");
  // beta^2 = 1 - alpha = exp(-0.161 V / (S T))
  return std::exp(-0.5 * sabine_alpha(room));
}

dsp::AudioBuffer simulate_rir(const RoomSpec& room, double beta,
                              int max_order) {
  for (int i = 0; i < 3; ++i) {
    check(room.dims[i] > 0.0, "bad_config",
          "room: dimensions must be positive");
    check(room.src[i] >= 0.0 && room.src[i] <= room.dims[i], "bad_config",
          "room: source outside the room");
    check(room.mic[i] >= 0.0 && room.mic[i] <= room.dims[i], "bad_config",
          "room: microphone outside the room");
  }
  check(!(room.src == room.mic), "bad_config",
        "room: source and microphone must not coincide");
  check(beta >= 0.0 && beta < 1.0, "bad_config",
        "room: reflection coefficient outside [0, 1)");
  check(room.rir_len > 0, "bad_config",
        "room: response length must be positive");

  const double fs = room.sample_rate;
  const double c = room.sound_speed;
  // Images farther than the span of the response (plus the kernel tail)
  // cannot contribute.
  const double reach =
      (static_cast<double>(room.rir_len) + kSincHalf) / fs * c;

  std::array<int, 3> n;
  for (int i = 0; i < 3; ++i) {
    if (max_order >= 0) {
      n[i] = max_order;
    } else {
      n[i] = static_cast<int>(std::ceil(reach / (2.0 * room.dims[i]))) + 1;
    }
  }

  std::vector<double> h(static_cast<size_t>(room.rir_len), 0.0);
  std::array<double, 3> d;
  std::array<int, 3> refl;
  for (int mx = -n[0]; mx <= n[0]; ++mx) {
    for (int qx = 0; qx <= 1; ++qx) {
      d[0] = (1 - 2 * qx) * room.src[0] + 2.0 * mx * room.dims[0] -
             room.mic[0];
      refl[0] = std::abs(mx - qx) + std::abs(mx);
      for (int my = -n[1]; my <= n[1]; ++my) {
        for (int qy = 0; qy <= 1; ++qy) {
          d[1] = (1 - 2 * qy) * room.src[1] + 2.0 * my * room.dims[1] -
                 room.mic[1];
          refl[1] = std::abs(my - qy) + std::abs(my);
          for (int mz = -n[2]; mz <= n[2]; ++mz) {
            for (int qz = 0; qz <= 1; ++qz) {
              d[2] = (1 - 2 * qz) * room.src[2] + 2.0 * mz * room.dims[2] -
                     room.mic[2];
              refl[2] = std::abs(mz - qz) + std::abs(mz);

              const double dist =
                  std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
              const double delay = dist / c * fs;
              if (delay >= room.rir_len + kSincHalf) continue;

              const int order = refl[0] + refl[1] + refl[2];
              const double amp =
                  std::pow(beta, static_cast<double>(order)) /
                  (4.0 * kPi * dist);
              if (amp == 0.0) continue;

              const i64 lo = std::max<i64>(
                  0, static_cast<i64>(std::ceil(delay)) - kSincHalf);
              const i64 hi = std::min<i64>(
                  room.rir_len - 1,
                  static_cast<i64>(std::floor(delay)) + kSincHalf);
              for (i64 t = lo; t <= hi; ++t) {
                h[static_cast<size_t>(t)] +=
                    amp * frac_tap(static_cast<double>(t) - delay);
              }
            }
          }
        }
      }
    }
  }

  dsp::AudioBuffer out;
  out.sample_rate = room.sample_rate;
  out.samples.resize(static_cast<size_t>(room.rir_len));
  for (size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = static_cast<float>(h[i]);
  }
  return out;
}

double estimate_rt60(const dsp::AudioBuffer& rir) {
  const i64 n = rir.size();
  check(n > 0, "bad_audio", "rt60: empty impulse response");

  // Backward-integrated energy curve.
  std::vector<double> energy(static_cast<size_t>(n));
  double acc = 0.0;
  for (i64 i = n - 1; i >= 0; --i) {
    const double v = rir.samples[static_cast<size_t>(i)];
    acc += v * v;
    energy[static_cast<size_t>(i)] = acc;
  }
  check(acc > 0.0, "bad_audio", "rt60: silent impulse response");

  const double floor_e = acc * 1e-30;
  auto level_db = [&](i64 i) {
    return 10.0 * std::log10(std::max(energy[static_cast<size_t>(i)],
                                      floor_e) /
                             acc);
  };

  i64 n5 = -1, n25 = -1;
  for (i64 i = 0; i < n; ++i) {
    const double db = level_db(i);
    if (n5 < 0 && db <= -5.0) n5 = i;
    if (db <= -25.0) {
      n25 = i;
      break;
    }
  }
  check(n5 >= 0 && n25 >= 0, "decay_too_short",
        "rt60: decay never spans the -5..-25 dB range");

  const double fs = rir.sample_rate;
  if (n25 - n5 < 10) {
    // The energy collapses essentially instantly (an impulse or a bare
    // direct path): report the extrapolated span instead of fitting.
    return static_cast<double>(n25 - n5) / fs * 3.0;
  }

  // Least-squares line over the fit span; slope is in dB per second.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(n25 - n5 + 1);
  for (i64 i = n5; i <= n25; ++i) {
    const double x = static_cast<double>(i) / fs;
    const double y = level_db(i);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  check(denom > 0.0, "decay_too_short", "rt60: degenerate fit span");
  const double slope = (m * sxy - sx * sy) / denom;
  check(slope < 0.0, "decay_too_short", "rt60: energy does not decay");
  return -60.0 / slope;
}

}  // namespace pse::data
