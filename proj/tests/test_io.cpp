// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "pse/error.hpp"
#include "pse/io/run_config.hpp"
#include "pse/io/wav.hpp"
#include "pse/io/weights.hpp"
#include "pse/model/model.hpp"
#include "pse/rng.hpp"

namespace fs = std::filesystem;
using pse::dsp::AudioBuffer;

namespace {

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "pse_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string tmp_file(const std::string& name) {
  return (work_dir() / name).string();
}

std::vector<uint8_t> slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(f),
                              std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  REQUIRE(f.good());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
}

// Rewrites the trailing checksum so tampering upstream of it stays "valid".
void reseal(std::vector<uint8_t>& bytes) {
  REQUIRE(bytes.size() > 4);
  const uint32_t crc = pse::io::crc32(bytes.data(), bytes.size() - 4);
  for (int i = 0; i < 4; ++i) {
    bytes[bytes.size() - 4 + static_cast<size_t>(i)] =
        static_cast<uint8_t>(crc >> (8 * i));
  }
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const pse::Error& e) {
    return e.code();
  }
  return "";
}

AudioBuffer ramp(pse::i64 n, int rate = 48000) {
  AudioBuffer b;
  b.sample_rate = rate;
  b.samples.resize(static_cast<size_t>(n));
  pse::Rng rng(5);
  for (auto& v : b.samples) {
    v = static_cast<float>(0.9 * (2.0 * rng.uniform() - 1.0));
  }
  return b;
}

}  // namespace

TEST_CASE("float wav roundtrip is bitwise") {
  const auto path = tmp_file("f32.wav");
  const auto src = ramp(1000);
  pse::io::write_wav(path, src, pse::io::WavEncoding::float32);
  const auto back = pse::io::read_wav(path);
  CHECK(back.sample_rate == 48000);
  CHECK(back.samples == src.samples);
}

TEST_CASE("pcm16 quantization is exact on grid values") {
  const auto path = tmp_file("p16.wav");
  AudioBuffer src;
  src.sample_rate = 16000;
  src.samples = {0.5f, -0.5f, 0.0f, 0.25f, 1.5f, -1.5f};
  pse::io::write_wav(path, src, pse::io::WavEncoding::pcm16);
  const auto back = pse::io::read_wav(path);
  CHECK(back.sample_rate == 16000);
  CHECK(back.samples[0] == 0.5f);  // 0.5 * 32768 = 16384, exactly on grid
  CHECK(back.samples[1] == -0.5f);
  CHECK(back.samples[2] == 0.0f);
  CHECK(back.samples[3] == 0.25f);
  CHECK(back.samples[4] == doctest::Approx(1.0f).epsilon(1e-4));  // clamped
  CHECK(back.samples[5] == -1.0f);
}

TEST_CASE("wav header layout") {
  const auto path = tmp_file("hdr.wav");
  pse::io::write_wav(path, ramp(100), pse::io::WavEncoding::pcm16);
  const auto b = slurp(path);
  REQUIRE(b.size() == 44 + 200);
  CHECK(std::memcmp(b.data(), "RIFF", 4) == 0);
  CHECK(std::memcmp(b.data() + 8, "WAVE", 4) == 0);
  CHECK(std::memcmp(b.data() + 12, "fmt ", 4) == 0);
  CHECK((b[20] | (b[21] << 8)) == 1);  // integer pcm
  CHECK((b[22] | (b[23] << 8)) == 1);  // mono
  const uint32_t rate = static_cast<uint32_t>(b[24]) | (b[25] << 8) |
                        (b[26] << 16) | (uint32_t(b[27]) << 24);
  CHECK(rate == 48000);
  CHECK((b[34] | (b[35] << 8)) == 16);
  CHECK(std::memcmp(b.data() + 36, "data", 4) == 0);
}

TEST_CASE("wav reader rejects what it cannot represent") {
  const auto good = tmp_file("good.wav");
  pse::io::write_wav(good, ramp(64), pse::io::WavEncoding::pcm16);
  auto bytes = slurp(good);

  SUBCASE("not a riff file") {
    const auto path = tmp_file("junk.wav");
    spit(path, {'J', 'U', 'N', 'K', 0, 0, 0, 0, 'J', 'U', 'N', 'K'});
    CHECK(code_of([&] { pse::io::read_wav(path); }) == "bad_wav");
  }
  SUBCASE("data chunk cut short") {
    const auto path = tmp_file("short.wav");
    bytes.resize(60);
    spit(path, bytes);
    CHECK(code_of([&] { pse::io::read_wav(path); }) == "truncated_wav");
  }
  SUBCASE("stereo") {
    const auto path = tmp_file("stereo.wav");
    bytes[22] = 2;
    spit(path, bytes);
    CHECK(code_of([&] { pse::io::read_wav(path); }) ==
          "unsupported_channels");
  }
  SUBCASE("exotic codec") {
    const auto path = tmp_file("codec.wav");
    bytes[20] = 85;  // mp3-in-wav tag
    spit(path, bytes);
    CHECK(code_of([&] { pse::io::read_wav(path); }) ==
          "unsupported_encoding");
  }
  SUBCASE("missing file") {
    CHECK(code_of([&] { pse::io::read_wav(tmp_file("nope.wav")); }) ==
          "io_error");
  }
}

TEST_CASE("weight files restore a model bitwise") {
  const auto path = tmp_file("toy.tpw");
  auto model = pse::model::Model::build(pse::model::ModelConfig::toy(), 11);
  pse::io::save_weights(model->registry(), path);

  std::vector<std::vector<float>> orig;
  for (const auto& e : model->registry().entries()) {
    orig.emplace_back(e.tensor->data(), e.tensor->data() + e.tensor->size());
    for (pse::i64 k = 0; k < e.tensor->size(); ++k) {
      (*e.tensor)[k] += 1.0f;  // scramble
    }
  }
  pse::io::load_weights(path, model->registry());
  size_t i = 0;
  for (const auto& e : model->registry().entries()) {
    const std::vector<float> now(e.tensor->data(),
                                 e.tensor->data() + e.tensor->size());
    CHECK(now == orig[i]);
    ++i;
  }
}

TEST_CASE("weight file corruption and mismatch handling") {
  pse::Tensor a({3, 4});
  pse::Tensor b({5});
  pse::Rng rng(3);
  for (pse::i64 k = 0; k < a.size(); ++k) a[k] = rng.normal();
  for (pse::i64 k = 0; k < b.size(); ++k) b[k] = rng.normal();

  pse::model::ParameterRegistry reg;
  reg.add("enc.w", pse::model::ParamGroup::MagNet, &a);
  reg.add("enc.b", pse::model::ParamGroup::MagNet, &b);

  const auto path = tmp_file("pair.tpw");
  pse::io::save_weights(reg, path);
  const auto pristine = slurp(path);

  SUBCASE("payload bit flip") {
    auto bytes = pristine;
    bytes[bytes.size() / 2] ^= 0x40;
    spit(path, bytes);
    CHECK(code_of([&] { pse::io::load_weights(path, reg); }) ==
          "crc_mismatch");
  }
  SUBCASE("wrong magic, checksum intact") {
    auto bytes = pristine;
    bytes[0] = 'X';
    reseal(bytes);
    spit(path, bytes);
    CHECK(code_of([&] { pse::io::load_weights(path, reg); }) == "bad_magic");
  }
  SUBCASE("future version, checksum intact") {
    auto bytes = pristine;
    bytes[4] = 2;
    reseal(bytes);
    spit(path, bytes);
    CHECK(code_of([&] { pse::io::load_weights(path, reg); }) ==
          "bad_version");
  }
  SUBCASE("stored tensor that the model does not have") {
    pse::Tensor only({3, 4});
    pse::model::ParameterRegistry other;
    other.add("enc.w", pse::model::ParamGroup::MagNet, &only);
    const auto p2 = tmp_file("other.tpw");
    pse::io::save_weights(other, p2);
    CHECK(code_of([&] { pse::io::load_weights(path, other); }) ==
          "unknown_tensor");
  }
  SUBCASE("model tensor missing from the file") {
    pse::Tensor only({3, 4});
    pse::model::ParameterRegistry other;
    other.add("enc.w", pse::model::ParamGroup::MagNet, &only);
    const auto p2 = tmp_file("only.tpw");
    pse::io::save_weights(other, p2);
    try {
      pse::io::load_weights(p2, reg);
      FAIL("expected a throw");
    } catch (const pse::Error& e) {
      CHECK(e.code() == "missing_tensor");
      CHECK(std::string(e.what()).find("enc.b") != std::string::npos);
    }
  }
  SUBCASE("same name, different shape") {
    pse::Tensor flat({12});
    pse::model::ParameterRegistry other;
    other.add("enc.w", pse::model::ParamGroup::MagNet, &flat);
    other.add("enc.b", pse::model::ParamGroup::MagNet, &b);
    try {
      pse::io::load_weights(path, other);
      FAIL("expected a throw");
    } catch (const pse::Error& e) {
      CHECK(e.code() == "shape_mismatch");
      CHECK(std::string(e.what()).find("enc.w") != std::string::npos);
    }
  }
}

TEST_CASE("crc32 matches the reference check value") {
  const char* s = "123456789";
  CHECK(pse::io::crc32(reinterpret_cast<const uint8_t*>(s), 9) ==
        0xCBF43926u);
}

TEST_CASE("writers never leave temporaries behind") {
  const auto dir = work_dir() / "atomic";
  fs::create_directories(dir);
  pse::io::write_wav((dir / "a.wav").string(), ramp(32));
  pse::Tensor t({2});
  pse::model::ParameterRegistry reg;
  reg.add("t", pse::model::ParamGroup::MagNet, &t);
  pse::io::save_weights(reg, (dir / "a.tpw").string());

  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    ++files;
    CHECK(entry.path().extension() != ".tmp");
  }
  CHECK(files == 2);
}

TEST_CASE("run configuration text") {
  SUBCASE("empty text keeps the standard setup") {
    const auto rc = pse::io::parse_run_config("");
    CHECK(rc.model.conv_channels == 64);
    CHECK(rc.model.lstm_hidden == 512);
    CHECK(rc.model.stft.fft_len == 960);
    CHECK(rc.model.sample_rate == 48000);
    CHECK(rc.seed == 0);
  }

  SUBCASE("comments, blanks, spacing, and every field") {
    const std::string text =
        "# reduced setup for fast tests\n"
        "\n"
        "n_fd = 2\n"
        "n_fu = 2\n"
        "conv_channels=4\n"
        "n_stcnl_groups = 1\n"
        "stcm_per_group = 2\n"
        "dilations = 1, 2   # short stack\n"
        "lstm_hidden = 8\n"
        "spk_blstm_hidden = 8\n"
        "spk_fd_layers = 1\n"
        "embedding_dim = 5\n"
        "fft_len = 10\n"
        "win_len = 10\n"
        "hop_len = 5\n"
        "seed = 7\n";
    const auto rc = pse::io::parse_run_config(text);
    const auto toy = pse::model::ModelConfig::toy();
    CHECK(rc.model.n_fd == toy.n_fd);
    CHECK(rc.model.conv_channels == toy.conv_channels);
    CHECK(rc.model.dilations == toy.dilations);
    CHECK(rc.model.lstm_hidden == toy.lstm_hidden);
    CHECK(rc.model.stft.win_len == toy.stft.win_len);
    CHECK(rc.model.embedding_dim == toy.embedding_dim);
    CHECK(rc.seed == 7);
  }

  SUBCASE("unknown keys are rejected, with the key named") {
    try {
      pse::io::parse_run_config("frobnicate=3\n");
      FAIL("expected a throw");
    } catch (const pse::Error& e) {
      CHECK(e.code() == "unknown_key");
      CHECK(std::string(e.what()).find("frobnicate") != std::string::npos);
    }
  }

  SUBCASE("malformed values carry the line") {
    CHECK(code_of([&] { pse::io::parse_run_config("seed=banana\n"); }) ==
          "bad_value");
    CHECK(code_of([&] { pse::io::parse_run_config("just a line\n"); }) ==
          "bad_config");
    CHECK(code_of([&] { pse::io::parse_run_config("seed=\n"); }) ==
          "bad_config");
  }

  SUBCASE("structural checks still run on the parsed result") {
    // lstm width must match the flattened bottleneck
    CHECK_THROWS_AS(pse::io::parse_run_config("lstm_hidden=100\n"),
                    pse::Error);
  }

  SUBCASE("file loader") {
    const auto path = tmp_file("run.cfg");
    std::ofstream(path) << "seed = 12\n";
    CHECK(pse::io::load_run_config(path).seed == 12);
    CHECK(code_of([&] { pse::io::load_run_config(tmp_file("no.cfg")); }) ==
          "io_error");
  }
}
