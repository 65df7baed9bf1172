// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <benchmark/benchmark.h>

#include <vector>

#include "pse/data/room.hpp"
#include "pse/dsp/stft.hpp"
#include "pse/model/model.hpp"
#include "pse/nn/layers.hpp"
#include "pse/rng.hpp"
#include "pse/tensor.hpp"

namespace {

using pse::Rng;
using pse::Tensor;

void BM_GConvStep(benchmark::State& state) {
  Rng rng(1);
  pse::nn::GConv2d conv(64, 64, 2, 3, 2, 1);
  conv.init(rng);
  auto st = conv.make_state(481);
  Tensor x({64, 481});
  for (pse::i64 i = 0; i < x.size(); ++i) x[i] = rng.normal();
  for (auto _ : state) {
    Tensor y = conv.step(st, x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_GConvStep);

void BM_StcmStep(benchmark::State& state) {
  Rng rng(1);
  pse::nn::Stcm stcm(512, 64, 5, 9);
  stcm.init(rng);
  auto st = stcm.make_state();
  std::vector<float> x(512);
  for (auto& v : x) v = rng.normal();
  for (auto _ : state) {
    auto y = stcm.step(st, x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_StcmStep);

void BM_LstmStep(benchmark::State& state) {
  Rng rng(1);
  pse::nn::Lstm lstm(512, 512);
  lstm.init(rng);
  auto st = lstm.make_state();
  std::vector<float> x(512);
  for (auto& v : x) v = rng.normal();
  std::vector<float> h(512);
  for (auto _ : state) {
    lstm.step(st, x.data(), h.data());
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK(BM_LstmStep);

void BM_Stft5s(benchmark::State& state) {
  Rng rng(2);
  pse::dsp::AudioBuffer buf;
  buf.samples.resize(48000 * 5);
  for (auto& v : buf.samples) v = 0.1f * rng.normal();
  pse::dsp::StftConfig cfg;
  for (auto _ : state) {
    auto spec = pse::dsp::stft(buf, cfg);
    benchmark::DoNotOptimize(spec.real.data());
  }
}
BENCHMARK(BM_Stft5s);

void BM_ModelFrame(benchmark::State& state) {
  auto model = pse::model::Model::build(pse::model::ModelConfig{}, 3);
  Rng rng(4);
  const pse::i64 bins = model->config().stft.bins();
  Tensor enroll_mag({50, bins});
  for (pse::i64 i = 0; i < enroll_mag.size(); ++i) {
    enroll_mag[i] = std::abs(rng.normal());
  }
  pse::model::SpeakerEmbedding emb;
  emb.e.assign(192, 0.0f);
  auto cond = model->condition_from_mag(enroll_mag, emb);
  auto st = model->make_state();
  std::vector<float> re(static_cast<size_t>(bins)), im(re.size());
  std::vector<float> ore(re.size()), oim(re.size());
  for (auto& v : re) v = rng.normal();
  for (auto& v : im) v = rng.normal();
  for (auto _ : state) {
    model->step(st, re.data(), im.data(), cond, ore.data(), oim.data());
    benchmark::DoNotOptimize(ore.data());
  }
}
BENCHMARK(BM_ModelFrame);

void BM_RirShort(benchmark::State& state) {
  pse::data::RoomSpec room;
  room.rir_len = 4800;
  room.rt60_target = 0.2;
  const double beta = pse::data::rt60_to_reflection_eyring(room);
  for (auto _ : state) {
    auto rir = pse::data::simulate_rir(room, beta);
    benchmark::DoNotOptimize(rir.samples.data());
  }
}
BENCHMARK(BM_RirShort);

}  // namespace

BENCHMARK_MAIN();
