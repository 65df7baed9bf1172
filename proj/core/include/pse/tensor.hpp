// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "pse/error.hpp"

namespace pse {

using i64 = std::int64_t;

// Dense row-major float32 tensor. Rank is dynamic (1..4 in practice).
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<i64> shape) : shape_(std::move(shape)) {
    i64 n = 1;
    for (i64 d : shape_) {
      check(d >= 0, "bad_shape", "negative tensor extent");
      n *= d;
    }
    data_.assign(static_cast<size_t>(n), 0.0f);
  }

  static Tensor zeros(std::vector<i64> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<i64> shape, float v) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), v);
    return t;
  }

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<i64>& shape() const { return shape_; }
  i64 dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  i64 size() const { return static_cast<i64>(data_.size()); }
  bool empty() const { return data_.empty(); }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }

  float& operator[](i64 i) { return data_[static_cast<size_t>(i)]; }
  const float& operator[](i64 i) const { return data_[static_cast<size_t>(i)]; }

  float& operator()(i64 a) { return data_[static_cast<size_t>(a)]; }
  const float& operator()(i64 a) const { return data_[static_cast<size_t>(a)]; }

  float& operator()(i64 a, i64 b) {
    return data_[static_cast<size_t>(a * shape_[1] + b)];
  }
  const float& operator()(i64 a, i64 b) const {
    return data_[static_cast<size_t>(a * shape_[1] + b)];
  }

  float& operator()(i64 a, i64 b, i64 c) {
    return data_[static_cast<size_t>((a * shape_[1] + b) * shape_[2] + c)];
  }
  const float& operator()(i64 a, i64 b, i64 c) const {
    return data_[static_cast<size_t>((a * shape_[1] + b) * shape_[2] + c)];
  }

  float& operator()(i64 a, i64 b, i64 c, i64 d) {
    return data_[static_cast<size_t>(
        (((a * shape_[1]) + b) * shape_[2] + c) * shape_[3] + d)];
  }
  const float& operator()(i64 a, i64 b, i64 c, i64 d) const {
    return data_[static_cast<size_t>(
        (((a * shape_[1]) + b) * shape_[2] + c) * shape_[3] + d)];
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool all_finite() const {
    for (float v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  std::string shape_str() const {
    std::string s = "[";
    for (size_t i = 0; i < shape_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(shape_[i]);
    }
    return s + "]";
  }

 private:
  std::vector<i64> shape_;
  std::vector<float> data_;
};

}  // namespace pse
