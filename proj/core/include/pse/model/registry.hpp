// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pse/tensor.hpp"

namespace pse::model {

using pse::i64;
using pse::Tensor;

enum class ParamGroup {
  MagNet,
  ComNet,
  SpkEncMag,
  SpkEncCom,
  FusionMag,
  FusionCom,
};

const char* to_string(ParamGroup g);
std::optional<ParamGroup> group_from_string(const std::string& s);
std::vector<ParamGroup> all_groups();

struct ParamEntry {
  std::string name;
  ParamGroup group;
  bool trainable = true;
  Tensor* tensor = nullptr;  // non-owning view into the model
};

// Ordered, name-addressable view over every parameter tensor in a model.
class ParameterRegistry {
 public:
  void add(const std::string& name, ParamGroup group, Tensor* tensor);

  const std::vector<ParamEntry>& entries() const { return entries_; }
  std::vector<ParamEntry>& entries() { return entries_; }

  const ParamEntry* find(const std::string& name) const;
  ParamEntry* find(const std::string& name);

  // Element counts over trainable entries, optionally restricted to a group.
  i64 count_params() const;
  i64 count_params(ParamGroup group) const;

  void set_trainable(ParamGroup group, bool trainable);
  void set_all_trainable(bool trainable);

 private:
  std::vector<ParamEntry> entries_;
  std::map<std::string, size_t> index_;
};

}  // namespace pse::model
