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
#include "skelact/resnet.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace skelact {
namespace {

// Box-Muller on top of mt19937_64 so initialization does not depend on the
// standard library's distribution internals.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : rng_(seed) {}

  double next(double stddev) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_ * stddev;
    }
    const double u1 = 1.0 - uniform01();  // (0,1]
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle) * stddev;
  }

 private:
  double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

void init_conv(Parameter& weight, GaussianRng& rng) {
  // fan_out = kernel area * output channels
  const double fan_out = 9.0 * weight.value.dim(0);
  const double stddev = std::sqrt(2.0 / fan_out);
  for (double& v : weight.value.data) v = rng.next(stddev);
}

}  // namespace

Tensor downsample_shortcut(const Tensor& input) {
  if (input.ndim() != 4) throw std::invalid_argument("downsample_shortcut: expected [B,C,H,W]");
  const int batch = input.dim(0), channels = input.dim(1), h = input.dim(2), w = input.dim(3);
  if (h % 2 != 0 || w % 2 != 0)
    throw std::invalid_argument("downsample_shortcut: spatial dims must be even, got " +
                                input.shape_str());
  Tensor out = Tensor::zeros({batch, 2 * channels, h / 2, w / 2});
  for (int b = 0; b < batch; ++b)
    for (int c = 0; c < channels; ++c)
      for (int y = 0; y < h / 2; ++y)
        for (int x = 0; x < w / 2; ++x) out.at(b, c, y, x) = input.at(b, c, 2 * y, 2 * x);
  return out;
}

Tensor downsample_shortcut_backward(const Tensor& out_grad, int in_channels) {
  const int batch = out_grad.dim(0), oh = out_grad.dim(2), ow = out_grad.dim(3);
  Tensor in_grad = Tensor::zeros({batch, in_channels, oh * 2, ow * 2});
  for (int b = 0; b < batch; ++b)
    for (int c = 0; c < in_channels; ++c)
      for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) in_grad.at(b, c, 2 * y, 2 * x) = out_grad.at(b, c, y, x);
  return in_grad;
}

ResidualBlock::ResidualBlock(int in_channels, int out_channels, int stride,
                             const std::string& name)
    : conv1(name + ".conv1.weight", {out_channels, in_channels, 3, 3}, true),
      conv2(name + ".conv2.weight", {out_channels, out_channels, 3, 3}, true),
      bn1(out_channels, name + ".bn1"),
      bn2(out_channels, name + ".bn2"),
      conv1_stride(stride) {
  if (stride == 2 && out_channels != 2 * in_channels)
    throw std::invalid_argument("ResidualBlock: downsampling must double the channels");
  if (stride == 1 && out_channels != in_channels)
    throw std::invalid_argument("ResidualBlock: identity shortcut needs equal channels");
}

Tensor ResidualBlock::forward(const Tensor& x, Mode mode, BlockTrace* trace) {
  if (mode == Mode::Eval) return forward_eval(x);
  if (!trace) throw std::invalid_argument("ResidualBlock: train-mode forward needs a trace");
  trace->input = x;
  Tensor z = nn::conv2d_forward(x, conv1.value, conv1_stride);
  z = nn::batch_norm_forward(z, bn1, Mode::Train, &trace->bn1_cache);
  trace->relu1_input = z;
  z = nn::relu_forward(z);
  trace->conv2_input = z;
  z = nn::conv2d_forward(z, conv2.value, 1);
  z = nn::batch_norm_forward(z, bn2, Mode::Train, &trace->bn2_cache);

  const Tensor shortcut = downsamples() ? downsample_shortcut(x) : x;
  for (std::size_t i = 0; i < z.data.size(); ++i) z.data[i] += shortcut.data[i];
  trace->sum_pre_relu = z;
  return nn::relu_forward(z);
}

Tensor ResidualBlock::forward_eval(const Tensor& x) const {
  Tensor z = nn::conv2d_forward(x, conv1.value, conv1_stride);
  z = nn::batch_norm_forward_eval(z, bn1);
  z = nn::relu_forward(z);
  z = nn::conv2d_forward(z, conv2.value, 1);
  z = nn::batch_norm_forward_eval(z, bn2);
  const Tensor shortcut = downsamples() ? downsample_shortcut(x) : x;
  for (std::size_t i = 0; i < z.data.size(); ++i) z.data[i] += shortcut.data[i];
  return nn::relu_forward(z);
}

Tensor ResidualBlock::backward(const Tensor& out_grad, const BlockTrace& trace) {
  const Tensor d_sum = nn::relu_backward(trace.sum_pre_relu, out_grad);

  // Branch path.
  Tensor d = nn::batch_norm_backward(d_sum, bn2, trace.bn2_cache);
  nn::Conv2dGrads g2 = nn::conv2d_backward(trace.conv2_input, conv2.value, 1, d);
  for (std::size_t i = 0; i < conv2.grad.data.size(); ++i)
    conv2.grad.data[i] += g2.weight_grad.data[i];
  d = nn::relu_backward(trace.relu1_input, g2.input_grad);
  d = nn::batch_norm_backward(d, bn1, trace.bn1_cache);
  nn::Conv2dGrads g1 = nn::conv2d_backward(trace.input, conv1.value, conv1_stride, d);
  for (std::size_t i = 0; i < conv1.grad.data.size(); ++i)
    conv1.grad.data[i] += g1.weight_grad.data[i];

  // Shortcut path joins the input gradient.
  Tensor in_grad = std::move(g1.input_grad);
  if (downsamples()) {
    const Tensor ds = downsample_shortcut_backward(d_sum, trace.input.dim(1));
    for (std::size_t i = 0; i < in_grad.data.size(); ++i) in_grad.data[i] += ds.data[i];
  } else {
    for (std::size_t i = 0; i < in_grad.data.size(); ++i) in_grad.data[i] += d_sum.data[i];
  }
  return in_grad;
}

ResNetModel build_resnet(const ResNetConfig& config) {
  if (std::find(kValidDepths.begin(), kValidDepths.end(), config.depth) == kValidDepths.end())
    throw std::invalid_argument("build_resnet: depth " + std::to_string(config.depth) +
                                " not in {20, 32, 44, 56, 110}");
  if (config.num_classes < 1) throw std::invalid_argument("build_resnet: num_classes < 1");

  ResNetModel model;
  model.config = config;
  const int n = config.blocks_per_stage();
  const auto& widths = config.stage_widths;

  model.stem = Parameter("stem.weight", {widths[0], 3, 3, 3}, true);
  model.stem_bn = BatchNormState(widths[0], "stem.bn");

  int block_index = 0;
  int in_ch = widths[0];
  for (int stage = 0; stage < 3; ++stage) {
    for (int i = 0; i < n; ++i) {
      const bool first = i == 0;
      const int out_ch = widths[stage];
      const int stride = (first && stage > 0) ? 2 : 1;
      model.blocks.emplace_back(stride == 2 ? in_ch : out_ch, out_ch, stride,
                                "block" + std::to_string(block_index));
      in_ch = out_ch;
      ++block_index;
    }
  }

  model.fc_weight = Parameter("fc.weight", {config.num_classes, widths[2]}, true);
  model.fc_bias = Parameter("fc.bias", {config.num_classes}, false);

  GaussianRng rng(config.seed);
  init_conv(model.stem, rng);
  for (auto& block : model.blocks) {
    init_conv(block.conv1, rng);
    init_conv(block.conv2, rng);
  }
  const double fc_std = std::sqrt(1.0 / widths[2]);
  for (double& v : model.fc_weight.value.data) v = rng.next(fc_std);
  return model;
}

Tensor ResNetModel::forward(const Tensor& batch, Mode mode, ModelTrace* trace) {
  if (mode == Mode::Eval) return forward_eval(batch);
  if (!trace) throw std::invalid_argument("ResNetModel: train-mode forward needs a trace");
  if (batch.ndim() != 4 || batch.dim(1) != 3 || batch.dim(2) != kInputSize ||
      batch.dim(3) != kInputSize)
    throw std::invalid_argument("ResNetModel: expected [B,3,32,32] input, got " +
                                batch.shape_str());

  trace->stem_input = batch;
  Tensor z = nn::conv2d_forward(batch, stem.value, 1);
  z = nn::batch_norm_forward(z, stem_bn, Mode::Train, &trace->stem_bn_cache);
  trace->stem_relu_input = z;
  z = nn::relu_forward(z);

  trace->blocks.resize(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i)
    z = blocks[i].forward(z, Mode::Train, &trace->blocks[i]);

  trace->feature_h = z.dim(2);
  trace->feature_w = z.dim(3);
  Tensor pooled = nn::global_avg_pool_forward(z);
  trace->fc_input = pooled;
  return nn::linear_forward(pooled, fc_weight.value, fc_bias.value);
}

Tensor ResNetModel::forward_eval(const Tensor& batch) const {
  if (batch.ndim() != 4 || batch.dim(1) != 3 || batch.dim(2) != kInputSize ||
      batch.dim(3) != kInputSize)
    throw std::invalid_argument("ResNetModel: expected [B,3,32,32] input, got " +
                                batch.shape_str());
  Tensor z = nn::conv2d_forward(batch, stem.value, 1);
  z = nn::batch_norm_forward_eval(z, stem_bn);
  z = nn::relu_forward(z);
  for (const auto& block : blocks) z = block.forward_eval(z);
  const Tensor pooled = nn::global_avg_pool_forward(z);
  return nn::linear_forward(pooled, fc_weight.value, fc_bias.value);
}

void ResNetModel::backward(const Tensor& logit_grad, const ModelTrace& trace) {
  nn::LinearGrads fc_grads = nn::linear_backward(trace.fc_input, fc_weight.value, logit_grad);
  for (std::size_t i = 0; i < fc_weight.grad.data.size(); ++i)
    fc_weight.grad.data[i] += fc_grads.weight_grad.data[i];
  for (std::size_t i = 0; i < fc_bias.grad.data.size(); ++i)
    fc_bias.grad.data[i] += fc_grads.bias_grad.data[i];

  Tensor d = nn::global_avg_pool_backward(fc_grads.input_grad, trace.feature_h, trace.feature_w);
  for (std::size_t i = blocks.size(); i-- > 0;) d = blocks[i].backward(d, trace.blocks[i]);

  d = nn::relu_backward(trace.stem_relu_input, d);
  d = nn::batch_norm_backward(d, stem_bn, trace.stem_bn_cache);
  nn::Conv2dGrads stem_grads = nn::conv2d_backward(trace.stem_input, stem.value, 1, d);
  for (std::size_t i = 0; i < stem.grad.data.size(); ++i)
    stem.grad.data[i] += stem_grads.weight_grad.data[i];
}

std::vector<Parameter*> ResNetModel::parameters() {
  std::vector<Parameter*> params;
  params.push_back(&stem);
  params.push_back(&stem_bn.gamma);
  params.push_back(&stem_bn.beta);
  for (auto& block : blocks) {
    params.push_back(&block.conv1);
    params.push_back(&block.bn1.gamma);
    params.push_back(&block.bn1.beta);
    params.push_back(&block.conv2);
    params.push_back(&block.bn2.gamma);
    params.push_back(&block.bn2.beta);
  }
  params.push_back(&fc_weight);
  params.push_back(&fc_bias);
  return params;
}

std::vector<const Parameter*> ResNetModel::parameters() const {
  auto params = const_cast<ResNetModel*>(this)->parameters();
  return {params.begin(), params.end()};
}

std::int64_t ResNetModel::param_count() const {
  std::int64_t count = 0;
  for (const Parameter* p : parameters()) count += p->value.numel();
  return count;
}

void ResNetModel::zero_grads() {
  for (Parameter* p : parameters()) p->zero_grad();
}

}  // namespace skelact
