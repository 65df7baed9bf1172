// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>

#include "pse/model/registry.hpp"

namespace pse::io {

// Binary container for named tensors. Little-endian throughout:
//   "TPW3" | u32 version | u32 tensor count
//   per tensor: u16 name length, name bytes, u8 rank, u32 per dimension,
//               float32 payload in row-major order
//   u32 CRC-32 of everything above
void save_weights(const model::ParameterRegistry& reg,
                  const std::string& path);

// Restores into an already-built registry. Every stored tensor must exist
// with the same shape, and every registered tensor must be present.
void load_weights(const std::string& path, model::ParameterRegistry& reg);

// CRC-32 (reflected, polynomial 0xEDB88320), as used by the weight files.
uint32_t crc32(const uint8_t* data, size_t n);

}  // namespace pse::io
