/*
 * Copyright 2026 The skelact authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef SKELACT_NN_TENSOR_HPP
#define SKELACT_NN_TENSOR_HPP

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace skelact::nn {

/// Dense row-major tensor of doubles.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> dims);

  static Tensor zeros(std::vector<int> dims) { return Tensor(std::move(dims)); }
  static Tensor from(std::vector<int> dims, std::vector<double> values);

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
  int ndim() const { return static_cast<int>(shape.size()); }

  // 4-d / 2-d element access for tests and cold paths; hot loops index data
  // directly.
  double& at(int a, int b, int c, int d);
  double at(int a, int b, int c, int d) const;
  double& at(int a, int b);
  double at(int a, int b) const;

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  std::string shape_str() const;  // "[2,3,4,4]"

  /// True when every entry is finite.
  bool all_finite() const;
};

/// A trainable tensor with its gradient and momentum buffer; the three
/// always share a shape. `decay` marks participation in weight decay
/// (convolution and linear weights only).
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor momentum;
  bool decay = false;

  Parameter() = default;
  Parameter(std::string param_name, std::vector<int> dims, bool weight_decay);

  void zero_grad();
};

}  // namespace skelact::nn

#endif  // SKELACT_NN_TENSOR_HPP
