// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/io/weights.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <vector>

#include "pse/error.hpp"

namespace pse::io {
namespace {

constexpr char kMagic[4] = {'T', 'P', 'W', '3'};
constexpr uint32_t kVersion = 1;

void wr_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void wr_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 24));
}

struct Reader {
  const uint8_t* p;
  size_t left;

  void need(size_t n) {
    check(left >= n, "bad_weights", "weight file truncated");
  }
  uint8_t u8() {
    need(1);
    const uint8_t v = *p;
    ++p;
    --left;
    return v;
  }
  uint16_t u16() {
    need(2);
    const uint16_t v = static_cast<uint16_t>(p[0] | (p[1] << 8));
    p += 2;
    left -= 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    const uint32_t v = static_cast<uint32_t>(p[0]) |
                       (static_cast<uint32_t>(p[1]) << 8) |
                       (static_cast<uint32_t>(p[2]) << 16) |
                       (static_cast<uint32_t>(p[3]) << 24);
    p += 4;
    left -= 4;
    return v;
  }
};

}  // namespace

uint32_t crc32(const uint8_t* data, size_t n) {
  static const auto table = [] {
    std::array<uint32_t, 256> t{};
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int k = 0; k < 8; ++k) {
        c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      }
      t[i] = c;
    }
    return t;
  }();
  uint32_t crc = 0xFFFFFFFFu;
  for (size_t i = 0; i < n; ++i) {
    crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
  }
  return crc ^ 0xFFFFFFFFu;
}

void save_weights(const model::ParameterRegistry& reg,
                  const std::string& path) {
  const auto& entries = reg.entries();
  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  wr_u32(out, kVersion);
  wr_u32(out, static_cast<uint32_t>(entries.size()));
  for (const auto& e : entries) {
    check(e.name.size() <= 0xFFFF, "bad_registry", "tensor name too long");
    wr_u16(out, static_cast<uint16_t>(e.name.size()));
    out.insert(out.end(), e.name.begin(), e.name.end());
    const Tensor& t = *e.tensor;
    out.push_back(static_cast<uint8_t>(t.rank()));
    for (int d = 0; d < t.rank(); ++d) {
      wr_u32(out, static_cast<uint32_t>(t.dim(d)));
    }
    for (i64 i = 0; i < t.size(); ++i) {
      wr_u32(out, std::bit_cast<uint32_t>(t[i]));
    }
  }
  wr_u32(out, crc32(out.data(), out.size()));

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

void load_weights(const std::string& path, model::ParameterRegistry& reg) {
  std::vector<uint8_t> buf;
  {
    std::ifstream f(path, std::ios::binary);
    check(f.good(), "io_error", "cannot open file: " + path);
    f.seekg(0, std::ios::end);
    const auto n = f.tellg();
    f.seekg(0, std::ios::beg);
    buf.resize(static_cast<size_t>(n));
    f.read(reinterpret_cast<char*>(buf.data()),
           static_cast<std::streamsize>(buf.size()));
    check(f.good(), "io_error", "cannot read file: " + path);
  }
  check(buf.size() >= 16, "bad_weights", "weight file truncated");

  Reader body{buf.data() + buf.size() - 4, 4};
  const uint32_t stored_crc = body.u32();
  check(crc32(buf.data(), buf.size() - 4) == stored_crc, "crc_mismatch",
        "weight file checksum does not match");

  Reader r{buf.data(), buf.size() - 4};
  r.need(4);
  check(std::memcmp(r.p, kMagic, 4) == 0, "bad_magic",
        "not a weight file");
  r.p += 4;
  r.left -= 4;
  const uint32_t version = r.u32();
  check(version == kVersion, "bad_version",
        "unsupported weight file version " + std::to_string(version));
  const uint32_t count = r.u32();

  std::set<std::string> seen;
  for (uint32_t i = 0; i < count; ++i) {
    const uint16_t name_len = r.u16();
    r.need(name_len);
    std::string name(reinterpret_cast<const char*>(r.p), name_len);
    r.p += name_len;
    r.left -= name_len;
    const uint8_t rank = r.u8();
    std::vector<i64> shape(rank);
    i64 size = 1;
    for (int d = 0; d < rank; ++d) {
      shape[static_cast<size_t>(d)] = static_cast<i64>(r.u32());
      size *= shape[static_cast<size_t>(d)];
    }
    check(seen.insert(name).second, "bad_weights",
          "duplicate tensor: " + name);

    const model::ParamEntry* entry = reg.find(name);
    check(entry != nullptr, "unknown_tensor", "unknown tensor: " + name);
    Tensor& t = *entry->tensor;
    check(t.rank() == rank && t.size() == size &&
              [&] {
                for (int d = 0; d < rank; ++d) {
                  if (t.dim(d) != shape[static_cast<size_t>(d)]) return false;
                }
                return true;
              }(),
          "shape_mismatch", "shape mismatch for tensor: " + name);
    for (i64 k = 0; k < size; ++k) {
      t[k] = std::bit_cast<float>(r.u32());
    }
  }
  check(r.left == 0, "bad_weights", "trailing bytes after last tensor");
  for (const auto& e : reg.entries()) {
    check(seen.count(e.name) != 0, "missing_tensor",
          "missing tensor: " + e.name);
  }
}

}  // namespace pse::io
