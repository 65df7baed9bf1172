// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <vector>

#include "pse/model/config.hpp"
#include "pse/model/registry.hpp"

namespace pse::model {

struct ParamStats {
  i64 total = 0;  // trainable elements
  std::vector<std::pair<std::string, i64>> per_group;
};

ParamStats param_stats(const ParameterRegistry& registry);

struct MacStats {
  i64 per_frame = 0;
  i64 per_second = 0;  // per second of audio at the model frame rate
  std::vector<std::pair<std::string, i64>> parts;  // per-frame
};

// Analytic multiply-accumulate accounting from the configuration alone.
// Convolutions count in_ch*out_ch*kt*kf per computed position (both gate
// branches), transposed convolutions per input position, LSTMs 4H(D+H) per
// frame, dense layers Din*Dout per frame.
MacStats mac_stats(const ModelConfig& cfg);

}  // namespace pse::model
