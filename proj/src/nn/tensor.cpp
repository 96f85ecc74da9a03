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
#include "skelact/nn/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace skelact::nn {

namespace {
std::size_t product(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("Tensor: non-positive dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<int> dims) : shape(std::move(dims)), data(product(shape), 0.0) {}

Tensor Tensor::from(std::vector<int> dims, std::vector<double> values) {
  Tensor t;
  t.shape = std::move(dims);
  if (product(t.shape) != values.size())
    throw std::invalid_argument("Tensor::from: value count does not match shape");
  t.data = std::move(values);
  return t;
}

double& Tensor::at(int a, int b, int c, int d) {
  return data[((static_cast<std::size_t>(a) * shape[1] + b) * shape[2] + c) * shape[3] + d];
}
double Tensor::at(int a, int b, int c, int d) const {
  return data[((static_cast<std::size_t>(a) * shape[1] + b) * shape[2] + c) * shape[3] + d];
}
double& Tensor::at(int a, int b) { return data[static_cast<std::size_t>(a) * shape[1] + b]; }
double Tensor::at(int a, int b) const { return data[static_cast<std::size_t>(a) * shape[1] + b]; }

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

bool Tensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

Parameter::Parameter(std::string param_name, std::vector<int> dims, bool weight_decay)
    : name(std::move(param_name)),
      value(dims),
      grad(dims),
      momentum(dims),
      decay(weight_decay) {}

void Parameter::zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }

}  // namespace skelact::nn
