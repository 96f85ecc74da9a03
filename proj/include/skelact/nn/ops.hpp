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
#ifndef SKELACT_NN_OPS_HPP
#define SKELACT_NN_OPS_HPP

#include <span>
#include <vector>

#include "skelact/nn/tensor.hpp"

namespace skelact::nn {

enum class Mode { Train, Eval };

// ---------------------------------------------------------------------------
// Convolution (3x3 kernels, padding 1, stride 1 or 2, no bias)
// ---------------------------------------------------------------------------

/// input [B,Cin,H,W], weight [Cout,Cin,3,3] -> [B,Cout,H/stride,W/stride].
/// Cross-correlation. H and W must be even when stride is 2.
Tensor conv2d_forward(const Tensor& input, const Tensor& weight, int stride);

struct Conv2dGrads {
  Tensor input_grad;
  Tensor weight_grad;
};

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& weight, int stride,
                            const Tensor& out_grad);

// ---------------------------------------------------------------------------
// Batch normalization over [B,C,H,W], statistics per channel
// ---------------------------------------------------------------------------

struct BatchNormState {
  Parameter gamma;
  Parameter beta;
  Tensor running_mean;
  Tensor running_var;
  double epsilon = 1e-5;
  double momentum = 0.1;  // running <- (1-m)*running + m*batch

  BatchNormState() = default;
  explicit BatchNormState(int channels, const std::string& name_prefix = "bn");
  int channels() const { return running_mean.dim(0); }
};

/// Saved batch statistics a train-mode backward needs.
struct BatchNormCache {
  Tensor x_hat;                 // normalized input, pre scale/shift
  std::vector<double> inv_std;  // per channel
};

/// Train mode normalizes by batch statistics and updates the running
/// averages (requires B*H*W >= 2); Eval mode normalizes by the running
/// statistics. `cache` must be non-null in Train mode when a backward pass
/// will follow.
Tensor batch_norm_forward(const Tensor& input, BatchNormState& state, Mode mode,
                          BatchNormCache* cache = nullptr);

/// Eval-mode forward; does not touch running statistics.
Tensor batch_norm_forward_eval(const Tensor& input, const BatchNormState& state);

/// Train-mode backward. Accumulates into state.gamma.grad / state.beta.grad
/// and returns the input gradient.
Tensor batch_norm_backward(const Tensor& out_grad, BatchNormState& state,
                           const BatchNormCache& cache);

// ---------------------------------------------------------------------------
// Pointwise and head ops
// ---------------------------------------------------------------------------

Tensor relu_forward(const Tensor& input);
/// Subgradient 0 at 0: passes out_grad where input > 0.
Tensor relu_backward(const Tensor& input, const Tensor& out_grad);

/// [B,C,H,W] -> [B,C] spatial mean.
Tensor global_avg_pool_forward(const Tensor& input);
Tensor global_avg_pool_backward(const Tensor& out_grad, int height, int width);

/// input [B,D], weight [N,D], bias [N] -> [B,N].
Tensor linear_forward(const Tensor& input, const Tensor& weight, const Tensor& bias);

struct LinearGrads {
  Tensor input_grad;
  Tensor weight_grad;
  Tensor bias_grad;
};

LinearGrads linear_backward(const Tensor& input, const Tensor& weight, const Tensor& out_grad);

/// Mean negative log-likelihood over the batch, stabilized by max
/// subtraction. Optionally emits the logit gradient (softmax minus one-hot,
/// divided by B) and the softmax probabilities.
double softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels,
                             Tensor* logit_grad = nullptr, Tensor* probs = nullptr);

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

/// momentum_buffer <- momentum*buffer + grad + weight_decay*value (decay only
/// where Parameter::decay); value <- value - lr*buffer; gradients zeroed.
/// Throws DivergenceError on a non-finite gradient.
void sgd_step(std::span<Parameter* const> params, double lr, double momentum,
              double weight_decay);

}  // namespace skelact::nn

#endif  // SKELACT_NN_OPS_HPP
