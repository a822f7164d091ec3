// Copyright 2026 The mayor-lab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MAYOR_TENSOR_H_
#define MAYOR_TENSOR_H_

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace mayor {

/// Dense row-major tensor of doubles.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> dims, double fill = 0.0)
      : dims_(std::move(dims)), values_(Count(dims_), fill) {}
  Tensor(std::vector<int> dims, std::vector<double> values)
      : dims_(std::move(dims)), values_(std::move(values)) {
    if (values_.size() != Count(dims_)) {
      throw std::invalid_argument("Tensor: value count does not match dims");
    }
  }

  std::span<const int> dims() const { return dims_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  static std::size_t Count(const std::vector<int>& dims) {
    std::size_t n = 1;
    for (int d : dims) {
      if (d < 0) throw std::invalid_argument("Tensor: negative dimension");
      n *= static_cast<std::size_t>(d);
    }
    return n;
  }

  std::vector<int> dims_;
  std::vector<double> values_;
};

}  // namespace mayor

#endif  // MAYOR_TENSOR_H_
