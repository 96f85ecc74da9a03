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
#ifndef SKELACT_RESNET_HPP
#define SKELACT_RESNET_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "skelact/nn/ops.hpp"
#include "skelact/nn/tensor.hpp"

namespace skelact {

using nn::BatchNormCache;
using nn::BatchNormState;
using nn::Mode;
using nn::Parameter;
using nn::Tensor;

inline constexpr std::array<int, 5> kValidDepths = {20, 32, 44, 56, 110};
inline constexpr int kInputSize = 32;

struct ResNetConfig {
  int depth = 20;  // 6n+2, n in {3,5,7,9,18}
  int num_classes = 10;
  std::array<int, 3> stage_widths = {16, 32, 64};
  std::uint64_t seed = 0;

  int blocks_per_stage() const { return (depth - 2) / 6; }
};

/// Stride-2 parameter-free shortcut: keep even-index pixels, zero-pad the
/// channels from C to 2C. Requires even spatial dims.
Tensor downsample_shortcut(const Tensor& input);
Tensor downsample_shortcut_backward(const Tensor& out_grad, int in_channels);

/// Per-block tensors saved by a train-mode forward for the backward pass.
struct BlockTrace {
  Tensor input;
  BatchNormCache bn1_cache;
  BatchNormCache bn2_cache;
  Tensor relu1_input;   // bn1 output
  Tensor conv2_input;   // relu output
  Tensor sum_pre_relu;  // branch + shortcut
};

/// conv(3x3) -> bn -> relu -> conv(3x3) -> bn -> add shortcut -> relu.
/// conv1 stride 2 doubles the width and halves the spatial size; the
/// shortcut is then the zero-padded downsample, otherwise the identity.
struct ResidualBlock {
  Parameter conv1;
  Parameter conv2;
  BatchNormState bn1;
  BatchNormState bn2;
  int conv1_stride = 1;

  ResidualBlock(int in_channels, int out_channels, int stride, const std::string& name);

  bool downsamples() const { return conv1_stride == 2; }
  Tensor forward(const Tensor& x, Mode mode, BlockTrace* trace);
  Tensor forward_eval(const Tensor& x) const;
  /// Accumulates parameter gradients, returns the input gradient.
  Tensor backward(const Tensor& out_grad, const BlockTrace& trace);
};

struct ModelTrace {
  Tensor stem_input;
  BatchNormCache stem_bn_cache;
  Tensor stem_relu_input;
  std::vector<BlockTrace> blocks;
  Tensor fc_input;  // pooled features [B,C]
  int feature_h = 0;
  int feature_w = 0;
};

struct ResNetModel {
  ResNetConfig config;
  Parameter stem;  // 3x3, 3 -> stage_widths[0], stride 1
  BatchNormState stem_bn;
  std::vector<ResidualBlock> blocks;  // 3 stages of n
  Parameter fc_weight;
  Parameter fc_bias;

  /// Logits [B,num_classes] for a [B,3,32,32] batch. Train mode updates
  /// batch-norm running statistics and requires a trace.
  Tensor forward(const Tensor& batch, Mode mode, ModelTrace* trace = nullptr);
  /// Pure eval-mode forward; safe to call concurrently on a frozen model.
  Tensor forward_eval(const Tensor& batch) const;
  /// Accumulates gradients of every parameter from the logit gradient.
  void backward(const Tensor& logit_grad, const ModelTrace& trace);

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::int64_t param_count() const;
  void zero_grads();
};

/// Builds the configured architecture deterministically from config.seed:
/// convolutions drawn from N(0, 2/fan_out), the classifier from
/// N(0, 1/fan_in), zero bias, gamma 1, beta 0. Throws std::invalid_argument
/// for a depth outside {20,32,44,56,110}.
ResNetModel build_resnet(const ResNetConfig& config);

}  // namespace skelact

#endif  // SKELACT_RESNET_HPP
