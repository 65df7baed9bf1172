// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/model/stream.hpp"

#include <complex>
#include <cstring>

#include "pse/dsp/fft.hpp"
#include "pse/error.hpp"

namespace pse::model {

StreamSession::StreamSession(const Model& model,
                             const dsp::AudioBuffer& enroll,
                             const SpeakerEmbedding& emb)
    : model_(model) {
  const dsp::StftConfig& stft = model.config().stft;
  win_ = stft.win_len;
  hop_ = stft.hop_len;
  fft_ = stft.fft_len;
  window_ = dsp::hann_window(win_);

  // Per-sample window-power sums, matching the offline overlap-add exactly:
  // the first emitted block is covered by one analysis frame, interior blocks
  // by two (earlier frame first), and the flushed tail by the last frame only.
  den_first_.resize(static_cast<size_t>(hop_));
  den_steady_.resize(static_cast<size_t>(hop_));
  den_last_.resize(static_cast<size_t>(hop_));
  for (int j = 0; j < hop_; ++j) {
    const double w0 = window_[static_cast<size_t>(j)];
    const double w1 = window_[static_cast<size_t>(j + hop_)];
    den_first_[static_cast<size_t>(j)] = w0 * w0;
    den_steady_[static_cast<size_t>(j)] = w1 * w1 + w0 * w0;
    den_last_[static_cast<size_t>(j)] = w1 * w1;
  }

  cond_ = model.condition(enroll, emb);
  state_ = model.make_state();
  ola_tail_.assign(static_cast<size_t>(hop_), 0.0);
  pending_.reserve(static_cast<size_t>(win_));
}

std::vector<float> StreamSession::push(const std::vector<float>& samples) {
  check(!flushed_, "bad_state", "stream already flushed; reset to reuse");
  check(static_cast<int>(samples.size()) == hop_, "bad_frame",
        "wrong frame length: expected " + std::to_string(hop_) + " samples");
  ++pushes_;
  pending_.insert(pending_.end(), samples.begin(), samples.end());
  if (static_cast<int>(pending_.size()) < win_) {
    // Algorithmic latency: the first hop is silence.
    return std::vector<float>(static_cast<size_t>(hop_), 0.0f);
  }

  // Analysis, identical to the offline front-end.
  std::vector<float> frame(static_cast<size_t>(fft_), 0.0f);
  for (int k = 0; k < win_; ++k)
    frame[static_cast<size_t>(k)] =
        pending_[static_cast<size_t>(k)] * window_[static_cast<size_t>(k)];
  const int bins = fft_ / 2 + 1;
  std::vector<std::complex<float>> spec(static_cast<size_t>(bins));
  dsp::rfft(fft_, frame.data(), spec.data());

  std::vector<float> re(static_cast<size_t>(bins));
  std::vector<float> im(static_cast<size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    re[static_cast<size_t>(b)] = spec[static_cast<size_t>(b)].real();
    im[static_cast<size_t>(b)] = spec[static_cast<size_t>(b)].imag();
  }
  std::vector<float> est_re(static_cast<size_t>(bins));
  std::vector<float> est_im(static_cast<size_t>(bins));
  model_.step(state_, re.data(), im.data(), cond_, est_re.data(),
              est_im.data());

  for (int b = 0; b < bins; ++b)
    spec[static_cast<size_t>(b)] = {est_re[static_cast<size_t>(b)],
                                    est_im[static_cast<size_t>(b)]};
  std::vector<float> synth(static_cast<size_t>(fft_));
  dsp::irfft(fft_, spec.data(), synth.data());

  const std::vector<double>& den =
      frames_done_ == 0 ? den_first_ : den_steady_;
  std::vector<float> out(static_cast<size_t>(hop_), 0.0f);
  for (int j = 0; j < hop_; ++j) {
    const double wj = window_[static_cast<size_t>(j)];
    const double num = ola_tail_[static_cast<size_t>(j)] +
                       synth[static_cast<size_t>(j)] * wj;
    const double d = den[static_cast<size_t>(j)];
    if (d > 1e-20)
      out[static_cast<size_t>(j)] = static_cast<float>(num / d);
  }
  for (int j = 0; j < hop_; ++j) {
    const double wj = window_[static_cast<size_t>(j + hop_)];
    ola_tail_[static_cast<size_t>(j)] =
        synth[static_cast<size_t>(j + hop_)] * wj;
  }

  ++frames_done_;
  pending_.erase(pending_.begin(), pending_.begin() + hop_);
  return out;
}

std::vector<float> StreamSession::flush() {
  check(!flushed_, "bad_state", "stream already flushed; reset to reuse");
  flushed_ = true;
  std::vector<float> out(static_cast<size_t>(hop_), 0.0f);
  if (frames_done_ == 0) return out;
  for (int j = 0; j < hop_; ++j) {
    const double d = den_last_[static_cast<size_t>(j)];
    if (d > 1e-20)
      out[static_cast<size_t>(j)] =
          static_cast<float>(ola_tail_[static_cast<size_t>(j)] / d);
  }
  return out;
}

void StreamSession::reset() {
  state_ = model_.make_state();
  pending_.clear();
  ola_tail_.assign(static_cast<size_t>(hop_), 0.0);
  frames_done_ = 0;
  pushes_ = 0;
  flushed_ = false;
}

}  // namespace pse::model
