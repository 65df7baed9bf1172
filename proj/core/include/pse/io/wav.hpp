// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>

#include "pse/dsp/stft.hpp"

namespace pse::io {

enum class WavEncoding { pcm16, float32 };

// Mono RIFF/WAVE only. 16-bit samples map to [-1, 1) by dividing by 32768;
// 32-bit float passes through.
dsp::AudioBuffer read_wav(const std::string& path);

// Writes via a temporary file and rename so a crash never leaves a partial
// file at the destination.
void write_wav(const std::string& path, const dsp::AudioBuffer& audio,
               WavEncoding enc = WavEncoding::float32);

}  // namespace pse::io
