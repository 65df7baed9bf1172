// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <vector>

#include "pse/loss/losses.hpp"
#include "pse/model/registry.hpp"

namespace pse::train {

enum class Phase { p1, p2, p3 };

const char* to_string(Phase p);

// Which parameter groups train in a phase, which stay frozen, and which
// composite loss drives it.
struct PhaseSpec {
  Phase id = Phase::p1;
  std::vector<model::ParamGroup> trainable;
  std::vector<model::ParamGroup> frozen;
  loss::CompositeKind loss = loss::CompositeKind::L1;
};

// p1: magnitude stage, its speaker encoder and fusion, loss without the
//     phase term.
// p2: the complex stage with its own speaker encoder and fusion; everything
//     trained in p1 stays frozen. Loss adds the phase term.
// p3: all groups, same loss as p2.
PhaseSpec phase_spec(Phase p);

// Flip the trainable flags in the registry to match the phase.
void phase_apply(const PhaseSpec& spec, model::ParameterRegistry& reg);

// Plateau-driven learning-rate decay: halve after `patience` consecutive
// epochs without strict improvement of the validation loss.
struct LrState {
  double lr = 1e-3;
  double best = 0.0;
  int stale = 0;
  double factor = 0.5;
  int patience = 2;
  bool seen_any = false;
};

// Consume one epoch's validation loss and return the updated state.
LrState lr_step(LrState s, double val_loss);

// Learning rate in effect after each epoch of the given loss sequence.
std::vector<double> lr_trace(const std::vector<double>& losses);

}  // namespace pse::train
