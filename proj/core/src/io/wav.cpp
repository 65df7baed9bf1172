// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/io/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "pse/error.hpp"

namespace pse::io {
namespace {

uint32_t rd_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t rd_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 24));
}

void wr_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void wr_tag(std::vector<uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  check(f.good(), "io_error", "cannot open file: " + path);
  f.seekg(0, std::ios::end);
  const auto n = f.tellg();
  f.seekg(0, std::ios::beg);
  std::vector<uint8_t> buf(static_cast<size_t>(n));
  f.read(reinterpret_cast<char*>(buf.data()), n);
  check(f.good(), "io_error", "cannot read file: " + path);
  return buf;
}

}  // namespace

dsp::AudioBuffer read_wav(const std::string& path) {
  const std::vector<uint8_t> buf = read_file(path);
  check(buf.size() >= 12, "bad_wav", "file too small for a RIFF header");
  check(std::memcmp(buf.data(), "RIFF", 4) == 0 &&
            std::memcmp(buf.data() + 8, "WAVE", 4) == 0,
        "bad_wav", "not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  const uint8_t* data = nullptr;
  uint32_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const uint8_t* id = buf.data() + pos;
    const uint32_t size = rd_u32(buf.data() + pos + 4);
    pos += 8;
    check(pos + size <= buf.size(), "truncated_wav",
          "chunk extends past end of file");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      check(size >= 16, "bad_wav", "format chunk too small");
      format = rd_u16(buf.data() + pos);
      channels = rd_u16(buf.data() + pos + 2);
      rate = rd_u32(buf.data() + pos + 4);
      bits = rd_u16(buf.data() + pos + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = buf.data() + pos;
      data_len = size;
    }
    pos += size + (size & 1);  // chunks are word aligned
  }
  check(have_fmt, "bad_wav", "missing format chunk");
  check(data != nullptr, "truncated_wav", "missing data chunk");
  check(channels == 1, "unsupported_channels",
        "only mono input is supported");

  dsp::AudioBuffer out;
  out.sample_rate = static_cast<int>(rate);
  if (format == 1) {
    check(bits == 16, "unsupported_encoding",
          "integer samples must be 16-bit");
    const uint32_t n = data_len / 2;
    out.samples.resize(n);
    for (uint32_t i = 0; i < n; ++i) {
      const auto v = static_cast<int16_t>(rd_u16(data + 2 * i));
      out.samples[i] = static_cast<float>(v) / 32768.0f;
    }
  } else if (format == 3) {
    check(bits == 32, "unsupported_encoding",
          "float samples must be 32-bit");
    const uint32_t n = data_len / 4;
    out.samples.resize(n);
    for (uint32_t i = 0; i < n; ++i) {
      out.samples[i] = std::bit_cast<float>(rd_u32(data + 4 * i));
    }
  } else {
    fail("unsupported_encoding",
         "unsupported format code " + std::to_string(format));
  }
  return out;
}

void write_wav(const std::string& path, const dsp::AudioBuffer& audio,
               WavEncoding enc) {
  check(audio.sample_rate > 0, "bad_audio", "sample rate must be positive");
  const uint16_t bytes_per = enc == WavEncoding::pcm16 ? 2 : 4;
  const uint32_t data_len =
      static_cast<uint32_t>(audio.samples.size()) * bytes_per;

  std::vector<uint8_t> out;
  out.reserve(44 + data_len);
  wr_tag(out, "RIFF");
  wr_u32(out, 36 + data_len);
  wr_tag(out, "WAVE");
  wr_tag(out, "fmt ");
  wr_u32(out, 16);
  wr_u16(out, enc == WavEncoding::pcm16 ? 1 : 3);
  wr_u16(out, 1);
  wr_u32(out, static_cast<uint32_t>(audio.sample_rate));
  wr_u32(out, static_cast<uint32_t>(audio.sample_rate) * bytes_per);
  wr_u16(out, bytes_per);
  wr_u16(out, static_cast<uint16_t>(bytes_per * 8));
  wr_tag(out, "data");
  wr_u32(out, data_len);
  if (enc == WavEncoding::pcm16) {
    for (float s : audio.samples) {
      const float scaled = std::round(s * 32768.0f);
      const auto v = static_cast<int16_t>(
          std::clamp(scaled, -32768.0f, 32767.0f));
      wr_u16(out, static_cast<uint16_t>(v));
    }
  } else {
    for (float s : audio.samples) wr_u32(out, std::bit_cast<uint32_t>(s));
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    check(f.good(), "io_error", "cannot open file for writing: " + tmp);
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
    check(f.good(), "io_error", "write failed: " + tmp);
  }
  check(std::rename(tmp.c_str(), path.c_str()) == 0, "io_error",
        "cannot move temporary file to: " + path);
}

}  // namespace pse::io
