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
#ifndef SKELACT_TESTS_NN_ORACLES_HPP
#define SKELACT_TESTS_NN_ORACLES_HPP

// Naive scalar references for the numerical core, written straight from
// the definitions with nested loops. No shared code with the library ops.

#include "skelact/nn/tensor.hpp"

namespace skelact::testing {

using nn::Tensor;

/// Six nested loops, zero padding of 1, 3x3 kernel, cross-correlation.
inline Tensor conv2d_oracle(const Tensor& input, const Tensor& weight, int stride) {
  const int batch = input.dim(0), cin = input.dim(1), h = input.dim(2), w = input.dim(3);
  const int cout = weight.dim(0);
  const int oh = (h + 2 - 3) / stride + 1;
  const int ow = (w + 2 - 3) / stride + 1;
  Tensor out = Tensor::zeros({batch, cout, oh, ow});
  for (int b = 0; b < batch; ++b)
    for (int oc = 0; oc < cout; ++oc)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          double acc = 0.0;
          for (int ic = 0; ic < cin; ++ic)
            for (int ky = 0; ky < 3; ++ky)
              for (int kx = 0; kx < 3; ++kx) {
                const int iy = oy * stride + ky - 1;
                const int ix = ox * stride + kx - 1;
                if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                acc += input.at(b, ic, iy, ix) * weight.at(oc, ic, ky, kx);
              }
          out.at(b, oc, oy, ox) = acc;
        }
  return out;
}

/// Row-by-row matrix product plus bias broadcast.
inline Tensor linear_oracle(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  const int batch = input.dim(0), dim = input.dim(1), classes = weight.dim(0);
  Tensor out = Tensor::zeros({batch, classes});
  for (int b = 0; b < batch; ++b)
    for (int c = 0; c < classes; ++c) {
      double acc = bias.data[static_cast<std::size_t>(c)];
      for (int d = 0; d < dim; ++d) acc += input.at(b, d) * weight.at(c, d);
      out.at(b, c) = acc;
    }
  return out;
}

/// Spatial mean per (batch, channel).
inline Tensor gap_oracle(const Tensor& input) {
  const int batch = input.dim(0), channels = input.dim(1), h = input.dim(2), w = input.dim(3);
  Tensor out = Tensor::zeros({batch, channels});
  for (int b = 0; b < batch; ++b)
    for (int c = 0; c < channels; ++c) {
      double acc = 0.0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) acc += input.at(b, c, y, x);
      out.at(b, c) = acc / (h * w);
    }
  return out;
}

}  // namespace skelact::testing

#endif  // SKELACT_TESTS_NN_ORACLES_HPP
