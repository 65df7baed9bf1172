// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>

#include "pse/model/config.hpp"

namespace pse::io {

struct RunConfig {
  model::ModelConfig model;
  uint64_t seed = 0;
};

// key=value lines; '#' starts a comment; blank lines ignored. Every key is
// optional and defaults to the standard configuration. Unknown keys are
// rejected rather than silently dropped.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace pse::io
