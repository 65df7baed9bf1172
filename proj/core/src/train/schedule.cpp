// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/train/schedule.hpp"

#include <cmath>

#include "pse/error.hpp"

namespace pse::train {

using model::ParamGroup;

const char* to_string(Phase p) {
  switch (p) {
    case Phase::p1: return "p1";
    case Phase::p2: return "p2";
    default: return "p3";
  }
}

PhaseSpec phase_spec(Phase p) {
  PhaseSpec s;
  s.id = p;
  switch (p) {
    case Phase::p1:
      s.trainable = {ParamGroup::MagNet, ParamGroup::SpkEncMag,
                     ParamGroup::FusionMag};
      s.frozen = {ParamGroup::ComNet, ParamGroup::SpkEncCom,
                  ParamGroup::FusionCom};
      s.loss = loss::CompositeKind::L1;
      break;
    case Phase::p2:
      s.trainable = {ParamGroup::ComNet, ParamGroup::SpkEncCom,
                     ParamGroup::FusionCom};
      s.frozen = {ParamGroup::MagNet, ParamGroup::SpkEncMag,
                  ParamGroup::FusionMag};
      s.loss = loss::CompositeKind::L2;
      break;
    case Phase::p3:
      s.trainable = model::all_groups();
      s.frozen = {};
      s.loss = loss::CompositeKind::L2;
      break;
  }
  return s;
}

void phase_apply(const PhaseSpec& spec, model::ParameterRegistry& reg) {
  for (ParamGroup g : spec.frozen) reg.set_trainable(g, false);
  for (ParamGroup g : spec.trainable) reg.set_trainable(g, true);
}

LrState lr_step(LrState s, double val_loss) {
  check(std::isfinite(val_loss), "bad_value",
        "schedule: validation loss must be finite");
  if (!s.seen_any || val_loss < s.best) {
    s.best = val_loss;
    s.stale = 0;
    s.seen_any = true;
    return s;
  }
  ++s.stale;
  if (s.stale >= s.patience) {
    s.lr *= s.factor;
    s.stale = 0;
  }
  return s;
}

std::vector<double> lr_trace(const std::vector<double>& losses) {
  LrState s;
  std::vector<double> trace;
  trace.reserve(losses.size());
  for (double l : losses) {
    s = lr_step(s, l);
    trace.push_back(s.lr);
  }
  return trace;
}

}  // namespace pse::train
