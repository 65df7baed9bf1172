// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "pse/error.hpp"
#include "pse/model/registry.hpp"
#include "pse/tensor.hpp"
#include "pse/train/schedule.hpp"

using namespace pse::train;
using pse::model::ParamGroup;

namespace {

// A small registry standing in for a real model: one tensor per group.
struct Rig {
  pse::Tensor t[6];
  pse::model::ParameterRegistry reg;

  Rig() {
    const ParamGroup groups[6] = {
        ParamGroup::MagNet,    ParamGroup::ComNet,    ParamGroup::SpkEncMag,
        ParamGroup::SpkEncCom, ParamGroup::FusionMag, ParamGroup::FusionCom,
    };
    for (int i = 0; i < 6; ++i) {
      t[i] = pse::Tensor({4});
      reg.add("g" + std::to_string(i), groups[i], &t[i]);
    }
  }

  bool trainable(ParamGroup g) const {
    for (const auto& e : reg.entries()) {
      if (e.group == g) return e.trainable;
    }
    FAIL("group not present");
    return false;
  }
};

}  // namespace

TEST_CASE("plateau-driven decay reproduces the frozen trace") {
  const std::vector<double> losses = {1.00, 0.98, 0.985, 0.99, 0.92};
  const auto lrs = lr_trace(losses);
  const std::vector<double> want = {1e-3, 1e-3, 1e-3, 5e-4, 5e-4};
  REQUIRE(lrs.size() == want.size());
  for (size_t i = 0; i < want.size(); ++i) CHECK(lrs[i] == want[i]);
}

TEST_CASE("strictly improving losses never decay the rate") {
  LrState st;
  double loss = 2.0;
  for (int i = 0; i < 40; ++i) {
    st = lr_step(st, loss);
    CHECK(st.lr == 1e-3);
    loss *= 0.99;
  }
}

TEST_CASE("an improvement resets the stale counter") {
  LrState st;
  for (double loss : {1.0, 1.1, 0.8, 0.9, 0.7}) {
    st = lr_step(st, loss);
    CHECK(st.lr == 1e-3);  // never two stale epochs in a row
  }
}

TEST_CASE("a flat loss halves the rate every `patience` epochs") {
  LrState st;
  st = lr_step(st, 1.0);  // first observation sets the best
  double prev = st.lr;
  for (int round = 0; round < 5; ++round) {
    st = lr_step(st, 1.0);
    CHECK(st.lr == prev);  // one stale epoch: not yet
    st = lr_step(st, 1.0);
    CHECK(st.lr == prev / 2.0);  // exact halving, no drift
    prev = st.lr;
  }
}

TEST_CASE("non-finite losses are rejected") {
  LrState st;
  CHECK_THROWS_AS(lr_step(st, std::numeric_limits<double>::quiet_NaN()),
                  pse::Error);
  try {
    lr_step(st, std::numeric_limits<double>::infinity());
    FAIL("expected a throw");
  } catch (const pse::Error& e) {
    CHECK(e.code() == "bad_value");
  }
}

TEST_CASE("phase contracts") {
  const auto p1 = phase_spec(Phase::p1);
  const auto p2 = phase_spec(Phase::p2);
  const auto p3 = phase_spec(Phase::p3);

  SUBCASE("first phase trains the magnitude side with the first loss") {
    CHECK(p1.loss == pse::loss::CompositeKind::L1);
    const std::vector<ParamGroup> want = {
        ParamGroup::MagNet, ParamGroup::SpkEncMag, ParamGroup::FusionMag};
    CHECK(p1.trainable == want);
  }

  SUBCASE("second phase swaps the sides and moves to the second loss") {
    CHECK(p2.loss == pse::loss::CompositeKind::L2);
    const std::vector<ParamGroup> want = {
        ParamGroup::ComNet, ParamGroup::SpkEncCom, ParamGroup::FusionCom};
    CHECK(p2.trainable == want);
    CHECK(p2.frozen == p1.trainable);
    CHECK(p1.frozen == p2.trainable);
  }

  SUBCASE("final phase trains everything") {
    CHECK(p3.loss == pse::loss::CompositeKind::L2);
    CHECK(p3.trainable.size() == 6);
    CHECK(p3.frozen.empty());
  }

  SUBCASE("each phase covers all six groups exactly once") {
    for (const auto& spec : {p1, p2, p3}) {
      std::vector<ParamGroup> all = spec.trainable;
      all.insert(all.end(), spec.frozen.begin(), spec.frozen.end());
      CHECK(all.size() == 6);
      std::sort(all.begin(), all.end());
      CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    }
  }
}

TEST_CASE("applying a phase flips the registry flags") {
  Rig rig;

  phase_apply(phase_spec(Phase::p1), rig.reg);
  CHECK(rig.trainable(ParamGroup::MagNet));
  CHECK(rig.trainable(ParamGroup::SpkEncMag));
  CHECK(rig.trainable(ParamGroup::FusionMag));
  CHECK_FALSE(rig.trainable(ParamGroup::ComNet));
  CHECK_FALSE(rig.trainable(ParamGroup::SpkEncCom));
  CHECK_FALSE(rig.trainable(ParamGroup::FusionCom));

  phase_apply(phase_spec(Phase::p2), rig.reg);
  CHECK_FALSE(rig.trainable(ParamGroup::MagNet));
  CHECK_FALSE(rig.trainable(ParamGroup::SpkEncMag));
  CHECK_FALSE(rig.trainable(ParamGroup::FusionMag));
  CHECK(rig.trainable(ParamGroup::ComNet));
  CHECK(rig.trainable(ParamGroup::SpkEncCom));
  CHECK(rig.trainable(ParamGroup::FusionCom));

  // applying the same phase twice is a no-op
  phase_apply(phase_spec(Phase::p2), rig.reg);
  CHECK_FALSE(rig.trainable(ParamGroup::MagNet));
  CHECK(rig.trainable(ParamGroup::ComNet));

  phase_apply(phase_spec(Phase::p3), rig.reg);
  for (const auto& e : rig.reg.entries()) CHECK(e.trainable);
}

TEST_CASE("phase names") {
  CHECK(std::string(to_string(Phase::p1)) == "p1");
  CHECK(std::string(to_string(Phase::p2)) == "p2");
  CHECK(std::string(to_string(Phase::p3)) == "p3");
}
