// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <vector>

#include "doctest.h"
#include "pse/error.hpp"
#include "pse/model/config.hpp"
#include "pse/model/model.hpp"
#include "pse/model/stats.hpp"
#include "pse/model/stream.hpp"
#include "pse/rng.hpp"

using pse::i64;
using pse::Rng;
using pse::Tensor;
using namespace pse::model;

namespace {

pse::dsp::AudioBuffer noise(i64 n, uint64_t seed, float scale = 0.1f) {
  pse::dsp::AudioBuffer b;
  b.samples.resize(static_cast<size_t>(n));
  Rng rng(seed);
  for (auto& v : b.samples) v = scale * rng.normal();
  return b;
}

}  // namespace

TEST_CASE("configurations validate") {
  ModelConfig def;
  def.validate();
  CHECK(def.freq_chain() == std::vector<i64>{481, 241, 121, 61, 31, 16, 8});
  CHECK(def.bottleneck_dim() == 512);

  ModelConfig toy = ModelConfig::toy();
  toy.validate();
  CHECK(toy.freq_chain() == std::vector<i64>{6, 3, 2});
  CHECK(toy.bottleneck_dim() == 8);

  ModelConfig bad = def;
  bad.lstm_hidden = 100;  // must equal the flattened bottleneck
  CHECK_THROWS_AS(bad.validate(), pse::Error);
  bad = def;
  bad.spk_fd_layers = 3;
  CHECK_THROWS_AS(bad.validate(), pse::Error);
  bad = def;
  bad.stft.hop_len = 320;
  CHECK_THROWS_AS(bad.validate(), pse::Error);
}

TEST_CASE("toy model: registry accounting") {
  auto model = Model::build(ModelConfig::toy(), 1);
  const auto& reg = model->registry();
  CHECK(reg.entries().size() == 164);
  CHECK(reg.count_params() == 6005);
  CHECK(reg.count_params(ParamGroup::MagNet) == 2053);
  CHECK(reg.count_params(ParamGroup::ComNet) == 3010);
  CHECK(reg.count_params(ParamGroup::SpkEncMag) == 423);
  CHECK(reg.count_params(ParamGroup::SpkEncCom) == 423);
  CHECK(reg.count_params(ParamGroup::FusionMag) == 48);
  CHECK(reg.count_params(ParamGroup::FusionCom) == 48);

  i64 sum = 0;
  for (ParamGroup g : all_groups()) sum += reg.count_params(g);
  CHECK(sum == reg.count_params());

  const auto stats = param_stats(reg);
  CHECK(stats.total == 6005);
  CHECK(stats.per_group.size() == 6);
}

TEST_CASE("default model: frozen accounting") {
  auto model = Model::build(ModelConfig{}, 1);
  const auto& reg = model->registry();
  CHECK(reg.entries().size() == 714);
  CHECK(reg.count_params() == 25575343);
  CHECK(reg.count_params(ParamGroup::MagNet) == 10633537);
  CHECK(reg.count_params(ParamGroup::ComNet) == 11227650);
  CHECK(reg.count_params(ParamGroup::SpkEncMag) == 1758262);
  CHECK(reg.count_params(ParamGroup::FusionMag) == 98816);
}

TEST_CASE("mac accounting has the advertised structure") {
  const auto stats = mac_stats(ModelConfig{});
  CHECK(stats.per_frame == 188896720);
  CHECK(stats.per_second == stats.per_frame * 100);
  i64 sum = 0;
  for (const auto& [name, n] : stats.parts) sum += n;
  CHECK(sum == stats.per_frame);
}

TEST_CASE("model build is deterministic per seed") {
  auto a = Model::build(ModelConfig::toy(), 42);
  auto b = Model::build(ModelConfig::toy(), 42);
  auto c = Model::build(ModelConfig::toy(), 43);
  bool all_equal = true, any_diff_seed = false;
  for (const auto& ea : a->registry().entries()) {
    const auto* eb = b->registry().find(ea.name);
    const auto* ec = c->registry().find(ea.name);
    REQUIRE(eb != nullptr);
    REQUIRE(ec != nullptr);
    for (i64 i = 0; i < ea.tensor->size(); ++i) {
      all_equal &= ((*ea.tensor)[i] == (*eb->tensor)[i]);
      any_diff_seed |= ((*ea.tensor)[i] != (*ec->tensor)[i]);
    }
  }
  CHECK(all_equal);
  CHECK(any_diff_seed);
}

TEST_CASE("speaker conditioning shapes") {
  const ModelConfig cfg = ModelConfig::toy();
  auto model = Model::build(cfg, 2);
  SpeakerEmbedding emb;
  emb.e.assign(static_cast<size_t>(cfg.embedding_dim), 0.25f);
  const auto enroll = noise(50, 3);
  const auto cond = model->condition(enroll, emb);

  // One pooled level per encoder concat point.
  REQUIRE(cond.mag.levels.size() == 1);
  CHECK(cond.mag.levels[0].size() == 3);  // 6 -> 3
  CHECK(cond.mag.gate.size() == 8);       // bottleneck
  REQUIRE(cond.com.levels.size() == 1);
  CHECK(model->spk_mag.level_freqs == std::vector<i64>{3});

  // Different encoders (independent weights) produce different features.
  bool differ = false;
  for (size_t i = 0; i < cond.mag.levels[0].size(); ++i) {
    differ |= (cond.mag.levels[0][i] != cond.com.levels[0][i]);
  }
  CHECK(differ);

  SpeakerEmbedding wrong;
  wrong.e.assign(7, 0.0f);
  CHECK_THROWS_AS(model->condition(enroll, wrong), pse::Error);
}

TEST_CASE("single-frame enrollment pools to that frame's features") {
  // With one enrollment frame the time average is the frame itself, so the
  // pooled vector must equal a direct pass truncated after one frame.
  const ModelConfig cfg = ModelConfig::toy();
  auto model = Model::build(cfg, 4);
  Tensor mag({1, cfg.stft.bins()});
  Rng rng(5);
  for (i64 i = 0; i < mag.size(); ++i) mag[i] = std::abs(rng.normal());
  const auto levels = model->spk_mag.forward(mag);
  REQUIRE(levels.size() == 1);
  const auto again = model->spk_mag.forward(mag);
  for (size_t i = 0; i < levels[0].size(); ++i) {
    CHECK(levels[0][i] == again[0][i]);
    CHECK(std::isfinite(levels[0][i]));
  }
}

TEST_CASE("first stage output is a bounded mask on the noisy spectrum") {
  const ModelConfig cfg = ModelConfig::toy();
  auto model = Model::build(cfg, 6);
  SpeakerEmbedding emb;
  emb.e.assign(static_cast<size_t>(cfg.embedding_dim), 0.0f);
  const auto cond = model->condition(noise(40, 7), emb);

  const i64 bins = cfg.stft.bins();
  auto st = model->make_state();
  Rng rng(8);
  std::vector<float> re(static_cast<size_t>(bins)), im(re.size());
  std::vector<float> ore(re.size()), oim(re.size());
  std::vector<float> s1re(re.size()), s1im(re.size());
  for (int t = 0; t < 12; ++t) {
    for (auto& v : re) v = rng.normal();
    for (auto& v : im) v = rng.normal();
    model->step(st, re.data(), im.data(), cond, ore.data(), oim.data(),
                s1re.data(), s1im.data());
    for (i64 k = 0; k < bins; ++k) {
      const auto kk = static_cast<size_t>(k);
      const double noisy_mag =
          std::hypot(double(re[kk]), double(im[kk]));
      const double s1_mag = std::hypot(double(s1re[kk]), double(s1im[kk]));
      // sigmoid mask in (0, 1): magnitude can only shrink
      CHECK(s1_mag <= noisy_mag * (1.0 + 1e-6));
      // masking preserves the noisy phase: cross product is zero
      const double cross =
          double(s1re[kk]) * im[kk] - double(s1im[kk]) * re[kk];
      CHECK(std::abs(cross) <= 1e-4 * noisy_mag * noisy_mag + 1e-6);
      CHECK(std::isfinite(ore[kk]));
      CHECK(std::isfinite(oim[kk]));
    }
  }
}

TEST_CASE("offline enhancement: length contract and determinism") {
  const ModelConfig cfg = ModelConfig::toy();
  auto model = Model::build(cfg, 9);
  SpeakerEmbedding emb;
  emb.e.assign(static_cast<size_t>(cfg.embedding_dim), 0.1f);
  const auto enroll = noise(60, 10);
  const auto noisy = noise(103, 11);

  pse::dsp::AudioBuffer stage1;
  const auto out = enhance_offline(*model, noisy, enroll, emb, &stage1);
  CHECK(out.size() == noisy.size());
  CHECK(stage1.size() == noisy.size());
  for (float v : out.samples) CHECK(std::isfinite(v));

  const auto out2 = enhance_offline(*model, noisy, enroll, emb);
  for (i64 i = 0; i < out.size(); ++i) {
    CHECK(out.samples[static_cast<size_t>(i)] ==
          out2.samples[static_cast<size_t>(i)]);
  }
}

TEST_CASE("streaming session equals the offline path") {
  const ModelConfig cfg = ModelConfig::toy();
  auto model = Model::build(cfg, 12);
  SpeakerEmbedding emb;
  emb.e.assign(static_cast<size_t>(cfg.embedding_dim), -0.2f);
  const auto enroll = noise(55, 13);
  const auto noisy = noise(100, 14);  // 20 hops of 5

  const auto offline = enhance_offline(*model, noisy, enroll, emb);

  StreamSession session(*model, enroll, emb);
  CHECK(session.hop() == 5);
  CHECK(session.latency() == 5);
  std::vector<float> streamed;
  std::vector<float> block(5);
  for (i64 p = 0; p < 20; ++p) {
    for (int j = 0; j < 5; ++j) {
      block[static_cast<size_t>(j)] =
          noisy.samples[static_cast<size_t>(p * 5 + j)];
    }
    const auto got = session.push(block);
    REQUIRE(got.size() == 5);
    streamed.insert(streamed.end(), got.begin(), got.end());
  }
  const auto tail = session.flush();
  streamed.insert(streamed.end(), tail.begin(), tail.end());
  REQUIRE(streamed.size() == 105);

  for (int j = 0; j < 5; ++j) CHECK(streamed[static_cast<size_t>(j)] == 0.0f);
  for (i64 i = 0; i < offline.size(); ++i) {
    CHECK(streamed[static_cast<size_t>(i + 5)] ==
          offline.samples[static_cast<size_t>(i)]);
  }

  CHECK_THROWS_AS(session.push(block), pse::Error);  // already flushed

  // reset keeps the enrollment conditioning and replays identically.
  session.reset();
  std::vector<float> replay;
  for (i64 p = 0; p < 20; ++p) {
    for (int j = 0; j < 5; ++j) {
      block[static_cast<size_t>(j)] =
          noisy.samples[static_cast<size_t>(p * 5 + j)];
    }
    const auto got = session.push(block);
    replay.insert(replay.end(), got.begin(), got.end());
  }
  const auto tail2 = session.flush();
  replay.insert(replay.end(), tail2.begin(), tail2.end());
  REQUIRE(replay.size() == streamed.size());
  for (size_t i = 0; i < replay.size(); ++i) CHECK(replay[i] == streamed[i]);
}

TEST_CASE("stream push validates the block size") {
  const ModelConfig cfg = ModelConfig::toy();
  auto model = Model::build(cfg, 15);
  SpeakerEmbedding emb;
  emb.e.assign(static_cast<size_t>(cfg.embedding_dim), 0.0f);
  StreamSession session(*model, noise(50, 16), emb);
  std::vector<float> wrong(3);
  CHECK_THROWS_AS(session.push(wrong), pse::Error);
}
