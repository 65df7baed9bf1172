// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/nn/layers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstring>

#include "pse/error.hpp"

namespace pse::nn {
namespace {

using MatMap = Eigen::Map<
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstMatMap = Eigen::Map<
    const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using VecMap = Eigen::Map<Eigen::VectorXf>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXf>;

inline float sigmoidf(float x) { return 1.0f / (1.0f + std::exp(-x)); }

}  // namespace

Tensor slice_frame(const Tensor& x, i64 t) {
  const i64 c = x.dim(0), tt = x.dim(1), f = x.dim(2);
  check(t >= 0 && t < tt, "bad_shape", "frame index out of range");
  Tensor frame({c, f});
  for (i64 ch = 0; ch < c; ++ch)
    std::memcpy(&frame(ch, 0), &x(ch, t, 0),
                static_cast<size_t>(f) * sizeof(float));
  return frame;
}

void set_frame(Tensor& x, i64 t, const Tensor& frame) {
  const i64 c = x.dim(0), f = x.dim(2);
  for (i64 ch = 0; ch < c; ++ch)
    std::memcpy(&x(ch, t, 0), &frame(ch, 0),
                static_cast<size_t>(f) * sizeof(float));
}

void init_uniform_fan_in(Tensor& t, i64 fan_in, Rng& rng) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(fan_in));
  float* p = t.data();
  const i64 n = t.size();
  for (i64 i = 0; i < n; ++i) p[i] = rng.uniform(-bound, bound);
}

// ---------------------------------------------------------------------------
// GConv2d

GConv2d::GConv2d(int cin, int cout, int kt, int kf, int stride_f, int pad_f)
    : cin_(cin), cout_(cout), kt_(kt), kf_(kf), stride_f_(stride_f),
      pad_f_(pad_f) {
  content_kernel = Tensor({cout, cin, kt, kf});
  content_bias = Tensor({cout});
  gate_kernel = Tensor({cout, cin, kt, kf});
  gate_bias = Tensor({cout});
}

void GConv2d::init(Rng& rng) {
  const i64 fan_in = static_cast<i64>(cin_) * kt_ * kf_;
  init_uniform_fan_in(content_kernel, fan_in, rng);
  init_uniform_fan_in(content_bias, fan_in, rng);
  init_uniform_fan_in(gate_kernel, fan_in, rng);
  init_uniform_fan_in(gate_bias, fan_in, rng);
}

GConv2d::State GConv2d::make_state(i64 f_in) const {
  State st;
  st.hist.assign(static_cast<size_t>(kt_ - 1), Tensor({cin_, f_in}));
  return st;
}

Tensor GConv2d::step(State& st, const Tensor& x) const {
  check(x.rank() == 2 && x.dim(0) == cin_, "bad_shape",
        "gated conv input channels mismatch: got " + x.shape_str());
  const i64 f_in = x.dim(1);
  const i64 f_out = out_freq(f_in);
  const i64 k = static_cast<i64>(cin_) * kt_ * kf_;

  st.patch.assign(static_cast<size_t>(k * f_out), 0.0f);
  for (int ci = 0; ci < cin_; ++ci) {
    for (int dt = 0; dt < kt_; ++dt) {
      const Tensor& fr = dt < kt_ - 1 ? st.hist[static_cast<size_t>(dt)] : x;
      const float* src = &fr(ci, 0);
      for (int df = 0; df < kf_; ++df) {
        float* row =
            st.patch.data() + ((static_cast<i64>(ci) * kt_ + dt) * kf_ + df) *
                                  f_out;
        for (i64 fo = 0; fo < f_out; ++fo) {
          const i64 fi = fo * stride_f_ - pad_f_ + df;
          if (fi >= 0 && fi < f_in) row[fo] = src[fi];
        }
      }
    }
  }

  Tensor y({cout_, f_out});
  Tensor g({cout_, f_out});
  ConstMatMap p(st.patch.data(), k, f_out);
  ConstMatMap kc(content_kernel.data(), cout_, k);
  ConstMatMap kg(gate_kernel.data(), cout_, k);
  MatMap ym(y.data(), cout_, f_out);
  MatMap gm(g.data(), cout_, f_out);
  ym.noalias() = kc * p;
  gm.noalias() = kg * p;

  for (int co = 0; co < cout_; ++co) {
    const float bc = content_bias(co);
    const float bg = gate_bias(co);
    float* yr = &y(co, 0);
    const float* gr = &g(co, 0);
    for (i64 fo = 0; fo < f_out; ++fo)
      yr[fo] = (yr[fo] + bc) * sigmoidf(gr[fo] + bg);
  }

  if (kt_ > 1) {
    for (size_t i = 0; i + 1 < st.hist.size(); ++i)
      st.hist[i] = st.hist[i + 1];
    st.hist.back() = x;
  }
  return y;
}

Tensor GConv2d::forward(const Tensor& x) const {
  check(x.rank() == 3 && x.dim(0) == cin_, "bad_shape",
        "gated conv input shape mismatch: got " + x.shape_str());
  const i64 t_len = x.dim(1);
  const i64 f_out = out_freq(x.dim(2));
  Tensor y({cout_, t_len, f_out});
  State st = make_state(x.dim(2));
  for (i64 t = 0; t < t_len; ++t)
    set_frame(y, t, step(st, slice_frame(x, t)));
  return y;
}

i64 GConv2d::param_count() const {
  return 2 * (static_cast<i64>(cin_) * cout_ * kt_ * kf_ + cout_);
}

i64 GConv2d::macs_per_frame(i64 f_in) const {
  return 2 * static_cast<i64>(cin_) * cout_ * kt_ * kf_ * out_freq(f_in);
}

// ---------------------------------------------------------------------------
// TrGConv2d

TrGConv2d::TrGConv2d(int cin, int cout, int kt, int kf, int stride_f,
                     int pad_f, i64 target_f)
    : cin_(cin), cout_(cout), kt_(kt), kf_(kf), stride_f_(stride_f),
      pad_f_(pad_f), target_f_(target_f) {
  content_kernel = Tensor({kt, kf, cout, cin});
  content_bias = Tensor({cout});
  gate_kernel = Tensor({kt, kf, cout, cin});
  gate_bias = Tensor({cout});
}

void TrGConv2d::init(Rng& rng) {
  const i64 fan_in = static_cast<i64>(cin_) * kt_ * kf_;
  init_uniform_fan_in(content_kernel, fan_in, rng);
  init_uniform_fan_in(content_bias, fan_in, rng);
  init_uniform_fan_in(gate_kernel, fan_in, rng);
  init_uniform_fan_in(gate_bias, fan_in, rng);
}

TrGConv2d::State TrGConv2d::make_state(i64 f_in) const {
  State st;
  st.hist.assign(static_cast<size_t>(kt_ - 1), Tensor({cin_, f_in}));
  return st;
}

Tensor TrGConv2d::step(State& st, const Tensor& x) const {
  check(x.rank() == 2 && x.dim(0) == cin_, "bad_shape",
        "transposed gated conv input channels mismatch: got " + x.shape_str());
  check(target_f_ > 0, "bad_config",
        "transposed gated conv has no recorded output size to crop to");
  const i64 f_in = x.dim(1);
  const i64 l_full = (f_in - 1) * stride_f_ + kf_;
  check(target_f_ + pad_f_ <= l_full, "bad_config",
        "transposed gated conv target size exceeds scatter range");

  const i64 full_n = 2 * static_cast<i64>(cout_) * l_full;
  st.full.assign(static_cast<size_t>(full_n), 0.0f);
  float* full_c = st.full.data();            // content plane
  float* full_g = st.full.data() + cout_ * l_full;  // gate plane

  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      contrib(cout_, f_in);
  ConstMatMap xm(x.data(), cin_, f_in);
  const i64 tap = static_cast<i64>(cout_) * cin_;
  for (int branch = 0; branch < 2; ++branch) {
    const Tensor& kernel = branch == 0 ? content_kernel : gate_kernel;
    float* full = branch == 0 ? full_c : full_g;
    for (int dt = 0; dt < kt_; ++dt) {
      const Tensor& fr = dt < kt_ - 1 ? st.hist[static_cast<size_t>(dt)] : x;
      ConstMatMap frm(fr.data(), cin_, f_in);
      for (int df = 0; df < kf_; ++df) {
        ConstMatMap km(kernel.data() + (static_cast<i64>(dt) * kf_ + df) * tap,
                       cout_, cin_);
        contrib.noalias() = km * frm;
        for (int co = 0; co < cout_; ++co) {
          float* dst = full + static_cast<i64>(co) * l_full + df;
          const float* src = contrib.data() + static_cast<i64>(co) * f_in;
          for (i64 fi = 0; fi < f_in; ++fi) dst[fi * stride_f_] += src[fi];
        }
      }
    }
  }

  Tensor y({cout_, target_f_});
  for (int co = 0; co < cout_; ++co) {
    const float bc = content_bias(co);
    const float bg = gate_bias(co);
    const float* rc = full_c + static_cast<i64>(co) * l_full + pad_f_;
    const float* rg = full_g + static_cast<i64>(co) * l_full + pad_f_;
    float* yr = &y(co, 0);
    for (i64 f = 0; f < target_f_; ++f)
      yr[f] = (rc[f] + bc) * sigmoidf(rg[f] + bg);
  }

  if (kt_ > 1) {
    for (size_t i = 0; i + 1 < st.hist.size(); ++i)
      st.hist[i] = st.hist[i + 1];
    st.hist.back() = x;
  }
  return y;
}

Tensor TrGConv2d::forward(const Tensor& x) const {
  check(x.rank() == 3 && x.dim(0) == cin_, "bad_shape",
        "transposed gated conv input shape mismatch: got " + x.shape_str());
  const i64 t_len = x.dim(1);
  Tensor y({cout_, t_len, target_f_});
  State st = make_state(x.dim(2));
  for (i64 t = 0; t < t_len; ++t)
    set_frame(y, t, step(st, slice_frame(x, t)));
  return y;
}

i64 TrGConv2d::param_count() const {
  return 2 * (static_cast<i64>(cin_) * cout_ * kt_ * kf_ + cout_);
}

i64 TrGConv2d::macs_per_frame(i64 f_in) const {
  return 2 * static_cast<i64>(cin_) * cout_ * kt_ * kf_ * f_in;
}

// ---------------------------------------------------------------------------
// CumLayerNorm

CumLayerNorm::CumLayerNorm(int channels) : channels_(channels) {
  gamma = Tensor({channels});
  beta = Tensor({channels});
  init();
}

void CumLayerNorm::init() {
  std::fill(gamma.data(), gamma.data() + gamma.size(), 1.0f);
  std::fill(beta.data(), beta.data() + beta.size(), 0.0f);
}

Tensor CumLayerNorm::step(State& st, const Tensor& x) const {
  check(x.rank() == 2 && x.dim(0) == channels_, "bad_shape",
        "cumulative norm channel mismatch: got " + x.shape_str());
  const i64 n = x.size();
  const float* p = x.data();
  for (i64 i = 0; i < n; ++i) {
    const double v = p[i];
    st.sum += v;
    st.sumsq += v * v;
  }
  st.count += n;

  const double mean = st.sum / static_cast<double>(st.count);
  double var = st.sumsq / static_cast<double>(st.count) - mean * mean;
  if (var < 0.0) var = 0.0;
  const double inv = 1.0 / std::sqrt(var + 1e-5);

  Tensor y(x.shape());
  const i64 f = x.dim(1);
  for (int c = 0; c < channels_; ++c) {
    const double g = gamma(c), b = beta(c);
    const float* xr = &x(c, 0);
    float* yr = &y(c, 0);
    for (i64 i = 0; i < f; ++i)
      yr[i] = static_cast<float>((xr[i] - mean) * inv * g + b);
  }
  return y;
}

Tensor CumLayerNorm::forward(const Tensor& x) const {
  check(x.rank() == 3 && x.dim(0) == channels_, "bad_shape",
        "cumulative norm input shape mismatch: got " + x.shape_str());
  Tensor y(x.shape());
  State st;
  for (i64 t = 0; t < x.dim(1); ++t)
    set_frame(y, t, step(st, slice_frame(x, t)));
  return y;
}

// ---------------------------------------------------------------------------
// VecLayerNorm

VecLayerNorm::VecLayerNorm(int dim) : dim_(dim) {
  gamma = Tensor({dim});
  beta = Tensor({dim});
  init();
}

void VecLayerNorm::init() {
  std::fill(gamma.data(), gamma.data() + gamma.size(), 1.0f);
  std::fill(beta.data(), beta.data() + beta.size(), 0.0f);
}

std::vector<float> VecLayerNorm::apply(const float* x) const {
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double v = x[i];
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / dim_;
  double var = sumsq / dim_ - mean * mean;
  if (var < 0.0) var = 0.0;
  const double inv = 1.0 / std::sqrt(var + 1e-5);
  std::vector<float> y(static_cast<size_t>(dim_));
  for (int i = 0; i < dim_; ++i)
    y[static_cast<size_t>(i)] =
        static_cast<float>((x[i] - mean) * inv * gamma(i) + beta(i));
  return y;
}

// ---------------------------------------------------------------------------
// PReLU

PReLU::PReLU(int channels) : channels_(channels) {
  slope = Tensor({channels});
  init();
}

void PReLU::init() {
  std::fill(slope.data(), slope.data() + slope.size(), 0.25f);
}

Tensor PReLU::apply(const Tensor& x) const {
  Tensor y = x;
  apply_inplace(y);
  return y;
}

void PReLU::apply_inplace(Tensor& x) const {
  check(x.dim(0) == channels_, "bad_shape",
        "prelu channel mismatch: got " + x.shape_str());
  const i64 per = x.size() / channels_;
  float* p = x.data();
  for (int c = 0; c < channels_; ++c) {
    const float a = slope(c);
    for (i64 i = 0; i < per; ++i, ++p)
      if (*p < 0.0f) *p *= a;
  }
}

void PReLU::apply_vec(std::vector<float>& x) const {
  check(static_cast<int>(x.size()) == channels_, "bad_shape",
        "prelu vector length mismatch");
  for (int c = 0; c < channels_; ++c)
    if (x[static_cast<size_t>(c)] < 0.0f) x[static_cast<size_t>(c)] *= slope(c);
}

// ---------------------------------------------------------------------------
// Dense

Dense::Dense(int din, int dout) : din_(din), dout_(dout) {
  w = Tensor({dout, din});
  b = Tensor({dout});
}

void Dense::init(Rng& rng) {
  init_uniform_fan_in(w, din_, rng);
  init_uniform_fan_in(b, din_, rng);
}

void Dense::apply(const float* x, float* y) const {
  ConstMatMap wm(w.data(), dout_, din_);
  ConstVecMap xv(x, din_);
  ConstVecMap bv(b.data(), dout_);
  VecMap yv(y, dout_);
  yv.noalias() = wm * xv + bv;
}

std::vector<float> Dense::apply(const std::vector<float>& x) const {
  check(static_cast<int>(x.size()) == din_, "bad_shape",
        "dense input length mismatch");
  std::vector<float> y(static_cast<size_t>(dout_));
  apply(x.data(), y.data());
  return y;
}

Tensor Dense::forward(const Tensor& x) const {
  check(x.rank() == 2 && x.dim(1) == din_, "bad_shape",
        "dense input shape mismatch: got " + x.shape_str());
  Tensor y({x.dim(0), dout_});
  for (i64 t = 0; t < x.dim(0); ++t) apply(&x(t, 0), &y(t, 0));
  return y;
}

i64 Dense::param_count() const {
  return static_cast<i64>(din_) * dout_ + dout_;
}

// ---------------------------------------------------------------------------
// Lstm

Lstm::Lstm(int din, int hidden) : din_(din), hidden_(hidden) {
  w_ih = Tensor({4 * hidden, din});
  w_hh = Tensor({4 * hidden, hidden});
  bias = Tensor({4 * hidden});
}

void Lstm::init(Rng& rng) {
  init_uniform_fan_in(w_ih, din_, rng);
  init_uniform_fan_in(w_hh, hidden_, rng);
  init_uniform_fan_in(bias, hidden_, rng);
}

Lstm::State Lstm::make_state() const {
  State st;
  st.h.assign(static_cast<size_t>(hidden_), 0.0f);
  st.c.assign(static_cast<size_t>(hidden_), 0.0f);
  st.gates.assign(static_cast<size_t>(4 * hidden_), 0.0f);
  return st;
}

void Lstm::step(State& st, const float* x, float* out) const {
  const int h = hidden_;
  ConstMatMap wi(w_ih.data(), 4 * h, din_);
  ConstMatMap wh(w_hh.data(), 4 * h, h);
  ConstVecMap xv(x, din_);
  ConstVecMap hv(st.h.data(), h);
  ConstVecMap bv(bias.data(), 4 * h);
  VecMap gv(st.gates.data(), 4 * h);
  gv.noalias() = wi * xv + wh * hv + bv;

  const float* g = st.gates.data();
  for (int i = 0; i < h; ++i) {
    const float ig = sigmoidf(g[i]);
    const float fg = sigmoidf(g[h + i]);
    const float cg = std::tanh(g[2 * h + i]);
    const float og = sigmoidf(g[3 * h + i]);
    const float c = fg * st.c[static_cast<size_t>(i)] + ig * cg;
    st.c[static_cast<size_t>(i)] = c;
    const float hn = og * std::tanh(c);
    st.h[static_cast<size_t>(i)] = hn;
    out[i] = hn;
  }
}

Tensor Lstm::forward(const Tensor& x) const {
  check(x.rank() == 2 && x.dim(1) == din_, "bad_shape",
        "lstm input shape mismatch: got " + x.shape_str());
  Tensor y({x.dim(0), hidden_});
  State st = make_state();
  for (i64 t = 0; t < x.dim(0); ++t) step(st, &x(t, 0), &y(t, 0));
  return y;
}

i64 Lstm::param_count() const {
  return 4LL * hidden_ * din_ + 4LL * hidden_ * hidden_ + 4LL * hidden_;
}

// ---------------------------------------------------------------------------
// Blstm

Blstm::Blstm(int din, int hidden_per_dir)
    : fw(din, hidden_per_dir), bw(din, hidden_per_dir) {}

void Blstm::init(Rng& rng) {
  fw.init(rng);
  bw.init(rng);
}

Tensor Blstm::forward(const Tensor& x) const {
  const i64 t_len = x.dim(0);
  const int h = fw.hidden();
  Tensor y({t_len, 2LL * h});
  Lstm::State sf = fw.make_state();
  std::vector<float> tmp(static_cast<size_t>(h));
  for (i64 t = 0; t < t_len; ++t) {
    fw.step(sf, &x(t, 0), tmp.data());
    std::memcpy(&y(t, 0), tmp.data(), static_cast<size_t>(h) * sizeof(float));
  }
  Lstm::State sb = bw.make_state();
  for (i64 t = t_len - 1; t >= 0; --t) {
    bw.step(sb, &x(t, 0), tmp.data());
    std::memcpy(&y(t, h), tmp.data(), static_cast<size_t>(h) * sizeof(float));
  }
  return y;
}

void Blstm::step() const {
  fail("non_causal", "non-causal layer: bidirectional LSTM has no streaming step");
}

// ---------------------------------------------------------------------------
// Stcm

Stcm::Stcm(int dim, int channels, int kernel, int dilation)
    : dim_(dim), channels_(channels), kernel_(kernel), dilation_(dilation) {
  pconv_in = Dense(dim, channels);
  act1 = PReLU(channels);
  norm1 = VecLayerNorm(channels);
  dconv_kernel = Tensor({channels, channels, kernel});
  dconv_bias = Tensor({channels});
  act2 = PReLU(channels);
  norm2 = VecLayerNorm(channels);
  pconv_out = Dense(channels, dim);
}

void Stcm::init(Rng& rng) {
  pconv_in.init(rng);
  const i64 fan_in = static_cast<i64>(channels_) * kernel_;
  init_uniform_fan_in(dconv_kernel, fan_in, rng);
  init_uniform_fan_in(dconv_bias, fan_in, rng);
  pconv_out.init(rng);
}

Stcm::State Stcm::make_state() const {
  State st;
  st.hist.assign(static_cast<size_t>((kernel_ - 1) * dilation_),
                 std::vector<float>(static_cast<size_t>(channels_), 0.0f));
  st.taps.assign(static_cast<size_t>(channels_) * kernel_, 0.0f);
  return st;
}

std::vector<float> Stcm::step(State& st, const std::vector<float>& x) const {
  check(static_cast<int>(x.size()) == dim_, "bad_shape",
        "temporal block input length mismatch");

  std::vector<float> v = pconv_in.apply(x);
  act1.apply_vec(v);
  v = norm1.apply(v.data());

  // Causal dilated conv over the channel vectors; tap j reads the input at
  // t - dilation*(kernel-1-j).
  const size_t ring = st.hist.size();
  for (int c = 0; c < channels_; ++c) {
    float* row = st.taps.data() + static_cast<size_t>(c) * kernel_;
    for (int j = 0; j < kernel_; ++j) {
      const i64 back = static_cast<i64>(dilation_) * (kernel_ - 1 - j);
      if (back == 0) {
        row[j] = v[static_cast<size_t>(c)];
      } else {
        const size_t idx = (st.next + ring - static_cast<size_t>(back)) % ring;
        row[j] = st.hist[idx][static_cast<size_t>(c)];
      }
    }
  }
  std::vector<float> d(static_cast<size_t>(channels_));
  {
    ConstMatMap km(dconv_kernel.data(), channels_,
                   static_cast<i64>(channels_) * kernel_);
    ConstVecMap tv(st.taps.data(), static_cast<i64>(channels_) * kernel_);
    ConstVecMap bv(dconv_bias.data(), channels_);
    VecMap dv(d.data(), channels_);
    dv.noalias() = km * tv + bv;
  }
  if (ring > 0) {
    st.hist[st.next] = v;
    st.next = (st.next + 1) % ring;
  }

  act2.apply_vec(d);
  d = norm2.apply(d.data());
  std::vector<float> y = pconv_out.apply(d);
  for (int i = 0; i < dim_; ++i) y[static_cast<size_t>(i)] += x[static_cast<size_t>(i)];
  return y;
}

Tensor Stcm::forward(const Tensor& x) const {
  check(x.rank() == 2 && x.dim(1) == dim_, "bad_shape",
        "temporal block input shape mismatch: got " + x.shape_str());
  Tensor y(x.shape());
  State st = make_state();
  std::vector<float> row(static_cast<size_t>(dim_));
  for (i64 t = 0; t < x.dim(0); ++t) {
    std::memcpy(row.data(), &x(t, 0), static_cast<size_t>(dim_) * sizeof(float));
    std::vector<float> out = step(st, row);
    std::memcpy(&y(t, 0), out.data(), static_cast<size_t>(dim_) * sizeof(float));
  }
  return y;
}

i64 Stcm::param_count() const {
  return pconv_in.param_count() + act1.param_count() + norm1.param_count() +
         static_cast<i64>(channels_) * channels_ * kernel_ + channels_ +
         act2.param_count() + norm2.param_count() + pconv_out.param_count();
}

i64 Stcm::macs_per_frame() const {
  return pconv_in.macs_per_frame() +
         static_cast<i64>(channels_) * channels_ * kernel_ +
         pconv_out.macs_per_frame();
}

}  // namespace pse::nn
