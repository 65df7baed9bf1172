// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/model/registry.hpp"

#include "pse/error.hpp"

namespace pse::model {

const char* to_string(ParamGroup g) {
  switch (g) {
    case ParamGroup::MagNet: return "mag_net";
    case ParamGroup::ComNet: return "com_net";
    case ParamGroup::SpkEncMag: return "spk_enc_mag";
    case ParamGroup::SpkEncCom: return "spk_enc_com";
    case ParamGroup::FusionMag: return "fusion_mag";
    case ParamGroup::FusionCom: return "fusion_com";
  }
  return "?";
}

std::optional<ParamGroup> group_from_string(const std::string& s) {
  for (ParamGroup g : all_groups())
    if (s == to_string(g)) return g;
  return std::nullopt;
}

std::vector<ParamGroup> all_groups() {
  return {ParamGroup::MagNet,     ParamGroup::ComNet,
          ParamGroup::SpkEncMag,  ParamGroup::SpkEncCom,
          ParamGroup::FusionMag,  ParamGroup::FusionCom};
}

void ParameterRegistry::add(const std::string& name, ParamGroup group,
                            Tensor* tensor) {
  check(tensor != nullptr, "bad_registry", "null parameter tensor: " + name);
  check(index_.find(name) == index_.end(), "bad_registry",
        "duplicate parameter name: " + name);
  index_[name] = entries_.size();
  entries_.push_back(ParamEntry{name, group, true, tensor});
}

const ParamEntry* ParameterRegistry::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

ParamEntry* ParameterRegistry::find(const std::string& name) {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

i64 ParameterRegistry::count_params() const {
  i64 n = 0;
  for (const ParamEntry& e : entries_)
    if (e.trainable) n += e.tensor->size();
  return n;
}

i64 ParameterRegistry::count_params(ParamGroup group) const {
  i64 n = 0;
  for (const ParamEntry& e : entries_)
    if (e.trainable && e.group == group) n += e.tensor->size();
  return n;
}

void ParameterRegistry::set_trainable(ParamGroup group, bool trainable) {
  for (ParamEntry& e : entries_)
    if (e.group == group) e.trainable = trainable;
}

void ParameterRegistry::set_all_trainable(bool trainable) {
  for (ParamEntry& e : entries_) e.trainable = trainable;
}

}  // namespace pse::model
