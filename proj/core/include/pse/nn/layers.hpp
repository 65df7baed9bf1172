// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <vector>

#include "pse/rng.hpp"
#include "pse/tensor.hpp"

namespace pse::nn {

using pse::i64;
using pse::Rng;
using pse::Tensor;

// Feature maps are [C, T, F] row-major; per-frame slices are [C, F].
Tensor slice_frame(const Tensor& x_ctf, i64 t);
void set_frame(Tensor& x_ctf, i64 t, const Tensor& frame);

// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
void init_uniform_fan_in(Tensor& t, i64 fan_in, Rng& rng);

// ---------------------------------------------------------------------------
// Gated 2-D convolution: y = conv(x; content) * sigmoid(conv(x; gate)).
// Causal in time (kt-1 frames of zero history), symmetric frequency padding.
class GConv2d {
 public:
  GConv2d() = default;
  GConv2d(int cin, int cout, int kt, int kf, int stride_f, int pad_f);

  void init(Rng& rng);

  static i64 out_freq(i64 f_in, int kf, int stride_f, int pad_f) {
    return (f_in + 2 * pad_f - kf) / stride_f + 1;
  }
  i64 out_freq(i64 f_in) const { return out_freq(f_in, kf_, stride_f_, pad_f_); }

  struct State {
    // kt-1 previous input frames, oldest first; zero at stream start.
    std::vector<Tensor> hist;
    std::vector<float> patch;  // scratch, (cin*kt*kf) x f_out
  };
  State make_state(i64 f_in) const;

  // x: [Cin, F] current frame -> [Cout, F'].
  Tensor step(State& st, const Tensor& x) const;
  // x: [Cin, T, F] -> [Cout, T, F'].
  Tensor forward(const Tensor& x) const;

  i64 param_count() const;
  // Multiplies per frame given the input frequency extent (both branches).
  i64 macs_per_frame(i64 f_in) const;

  int cin() const { return cin_; }
  int cout() const { return cout_; }

  Tensor content_kernel;  // [Cout, Cin, kt, kf]
  Tensor content_bias;    // [Cout]
  Tensor gate_kernel;     // [Cout, Cin, kt, kf]
  Tensor gate_bias;       // [Cout]

 private:
  int cin_ = 0, cout_ = 0, kt_ = 0, kf_ = 0, stride_f_ = 0, pad_f_ = 0;
};

// ---------------------------------------------------------------------------
// Transposed gated 2-D convolution. Frequency axis is upsampled by stride
// (scatter formulation) and cropped: output f takes full-resolution position
// f + pad_f, and positions beyond the scatter range are zero. Causal in time:
// output frame t reads input frames t-kt+1 .. t.
class TrGConv2d {
 public:
  TrGConv2d() = default;
  TrGConv2d(int cin, int cout, int kt, int kf, int stride_f, int pad_f,
            i64 target_f);

  void init(Rng& rng);

  struct State {
    std::vector<Tensor> hist;  // kt-1 previous input frames, oldest first
    std::vector<float> full;   // scratch, cout x (2*f_in + kf - 2)
  };
  State make_state(i64 f_in) const;

  Tensor step(State& st, const Tensor& x) const;  // [Cin,F] -> [Cout,target_f]
  Tensor forward(const Tensor& x) const;          // [Cin,T,F] -> [Cout,T,target_f]

  i64 param_count() const;
  // Counted per input position (the multiplies the scatter actually performs).
  i64 macs_per_frame(i64 f_in) const;

  i64 target_f() const { return target_f_; }

  // Kernels stored [kt, kf, Cout, Cin] so each (dt, df) tap is a contiguous
  // matrix for the per-tap matrix product.
  Tensor content_kernel;
  Tensor content_bias;  // [Cout]
  Tensor gate_kernel;
  Tensor gate_bias;  // [Cout]

 private:
  int cin_ = 0, cout_ = 0, kt_ = 0, kf_ = 0, stride_f_ = 0, pad_f_ = 0;
  i64 target_f_ = 0;
};

// ---------------------------------------------------------------------------
// Cumulative layer norm: statistics over all (C, F) positions of frames <= t,
// per-channel affine.
class CumLayerNorm {
 public:
  CumLayerNorm() = default;
  explicit CumLayerNorm(int channels);

  void init();  // gamma = 1, beta = 0

  struct State {
    double sum = 0.0;
    double sumsq = 0.0;
    i64 count = 0;
  };

  Tensor step(State& st, const Tensor& x) const;  // [C,F] -> [C,F]
  Tensor forward(const Tensor& x) const;          // [C,T,F] -> [C,T,F]

  i64 param_count() const { return 2 * channels_; }

  Tensor gamma;  // [C]
  Tensor beta;   // [C]

 private:
  int channels_ = 0;
};

// ---------------------------------------------------------------------------
// Per-frame layer norm over a feature vector, affine per feature.
class VecLayerNorm {
 public:
  VecLayerNorm() = default;
  explicit VecLayerNorm(int dim);

  void init();

  std::vector<float> apply(const float* x) const;

  i64 param_count() const { return 2 * dim_; }

  Tensor gamma;  // [D]
  Tensor beta;   // [D]

 private:
  int dim_ = 0;
};

// ---------------------------------------------------------------------------
// PReLU with per-channel slope (leading axis of the frame).
class PReLU {
 public:
  PReLU() = default;
  explicit PReLU(int channels);

  void init();  // slopes = 0.25

  Tensor apply(const Tensor& x) const;  // [C,F] or [C]
  void apply_inplace(Tensor& x) const;
  void apply_vec(std::vector<float>& x) const;  // [C] feature vector

  i64 param_count() const { return channels_; }

  Tensor slope;  // [C]

 private:
  int channels_ = 0;
};

// ---------------------------------------------------------------------------
// Dense y = Wx + b applied per frame.
class Dense {
 public:
  Dense() = default;
  Dense(int din, int dout);

  void init(Rng& rng);

  void apply(const float* x, float* y) const;
  std::vector<float> apply(const std::vector<float>& x) const;
  Tensor forward(const Tensor& x) const;  // [T,Din] -> [T,Dout]

  i64 param_count() const;
  i64 macs_per_frame() const { return static_cast<i64>(din_) * dout_; }

  int din() const { return din_; }
  int dout() const { return dout_; }

  Tensor w;  // [Dout, Din]
  Tensor b;  // [Dout]

 private:
  int din_ = 0, dout_ = 0;
};

// ---------------------------------------------------------------------------
// Unidirectional LSTM. Gate rows ordered [input; forget; cell; output].
class Lstm {
 public:
  Lstm() = default;
  Lstm(int din, int hidden);

  void init(Rng& rng);

  struct State {
    std::vector<float> h, c;
    std::vector<float> gates;  // scratch [4H]
  };
  State make_state() const;

  void step(State& st, const float* x, float* out) const;
  Tensor forward(const Tensor& x) const;  // [T,Din] -> [T,H]

  i64 param_count() const;
  i64 macs_per_frame() const {
    return 4LL * hidden_ * (din_ + hidden_);
  }

  int din() const { return din_; }
  int hidden() const { return hidden_; }

  Tensor w_ih;  // [4H, Din]
  Tensor w_hh;  // [4H, H]
  Tensor bias;  // [4H]

 private:
  int din_ = 0, hidden_ = 0;
};

// ---------------------------------------------------------------------------
// Bidirectional LSTM; offline only. Streaming step raises a non-causal error.
class Blstm {
 public:
  Blstm() = default;
  Blstm(int din, int hidden_per_dir);

  void init(Rng& rng);

  Tensor forward(const Tensor& x) const;  // [T,Din] -> [T,2H]
  [[noreturn]] void step() const;         // always throws: non-causal layer

  i64 param_count() const { return fw.param_count() + bw.param_count(); }
  i64 macs_per_frame() const {
    return fw.macs_per_frame() + bw.macs_per_frame();
  }

  Lstm fw, bw;
};

// ---------------------------------------------------------------------------
// Squeezed temporal convolution module over per-frame feature vectors [D]:
// PConv(D->C) -> PReLU -> LN -> causal dilated DConv(C, k) -> PReLU -> LN ->
// PConv(C->D), plus a residual connection from the input.
class Stcm {
 public:
  Stcm() = default;
  Stcm(int dim, int channels, int kernel, int dilation);

  void init(Rng& rng);

  struct State {
    // (kernel-1)*dilation past DConv inputs, oldest first.
    std::vector<std::vector<float>> hist;
    size_t next = 0;  // ring cursor
    std::vector<float> taps;  // scratch [C*kernel]
  };
  State make_state() const;

  std::vector<float> step(State& st, const std::vector<float>& x) const;
  Tensor forward(const Tensor& x) const;  // [T,D] -> [T,D]

  i64 param_count() const;
  i64 macs_per_frame() const;

  int dilation() const { return dilation_; }

  Dense pconv_in;        // D -> C
  PReLU act1;            // [C]
  VecLayerNorm norm1;    // [C]
  Tensor dconv_kernel;   // [C, C, k]
  Tensor dconv_bias;     // [C]
  PReLU act2;            // [C]
  VecLayerNorm norm2;    // [C]
  Dense pconv_out;       // C -> D

 private:
  int dim_ = 0, channels_ = 0, kernel_ = 0, dilation_ = 0;
};

}  // namespace pse::nn
