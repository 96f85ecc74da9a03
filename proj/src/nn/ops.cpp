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
#include "skelact/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "skelact/common.hpp"

namespace skelact::nn {
namespace {

// C[M,N] += A[M,K] * B[K,N]. Tiled over N so the B row slice and the C tile
// stay cache-resident; the inner loop has no reduction and vectorizes.
void gemm_nn_acc(int m_dim, int n_dim, int k_dim, const double* a, const double* b, double* c) {
  constexpr int kTile = 256;
  for (int j0 = 0; j0 < n_dim; j0 += kTile) {
    const int j1 = std::min(n_dim, j0 + kTile);
    for (int k = 0; k < k_dim; ++k) {
      const double* b_row = b + static_cast<std::size_t>(k) * n_dim;
      for (int i = 0; i < m_dim; ++i) {
        const double a_ik = a[static_cast<std::size_t>(i) * k_dim + k];
        double* c_row = c + static_cast<std::size_t>(i) * n_dim;
        for (int j = j0; j < j1; ++j) c_row[j] += a_ik * b_row[j];
      }
    }
  }
}

struct ConvDims {
  int batch, cin, h, w, cout, oh, ow;
  int patch() const { return cin * 9; }
  std::size_t out_plane() const { return static_cast<std::size_t>(oh) * ow; }
};

ConvDims conv_dims(const Tensor& input, const Tensor& weight, int stride) {
  if (input.ndim() != 4 || weight.ndim() != 4 || weight.dim(2) != 3 || weight.dim(3) != 3)
    throw std::invalid_argument("conv2d: expected input [B,C,H,W] and weight [O,C,3,3], got " +
                                input.shape_str() + " and " + weight.shape_str());
  if (input.dim(1) != weight.dim(1))
    throw std::invalid_argument("conv2d: channel mismatch between input " + input.shape_str() +
                                " and weight " + weight.shape_str());
  if (stride != 1 && stride != 2) throw std::invalid_argument("conv2d: stride must be 1 or 2");
  ConvDims d{input.dim(0), input.dim(1), input.dim(2), input.dim(3), weight.dim(0), 0, 0};
  if (stride == 2 && (d.h % 2 != 0 || d.w % 2 != 0))
    throw std::invalid_argument("conv2d: stride 2 needs even spatial dims, got " +
                                input.shape_str());
  d.oh = (d.h + 2 - 3) / stride + 1;
  d.ow = (d.w + 2 - 3) / stride + 1;
  return d;
}

// Patch matrix, one row per (channel, ky, kx), one column per output pixel.
void im2col(const double* in, const ConvDims& d, int stride, double* col) {
  for (int c = 0; c < d.cin; ++c) {
    const double* plane = in + static_cast<std::size_t>(c) * d.h * d.w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        double* row = col + static_cast<std::size_t>((c * 3 + ky) * 3 + kx) * d.out_plane();
        for (int oy = 0; oy < d.oh; ++oy) {
          const int iy = oy * stride + ky - 1;
          double* dst = row + static_cast<std::size_t>(oy) * d.ow;
          if (iy < 0 || iy >= d.h) {
            std::fill(dst, dst + d.ow, 0.0);
            continue;
          }
          const double* src = plane + static_cast<std::size_t>(iy) * d.w;
          for (int ox = 0; ox < d.ow; ++ox) {
            const int ix = ox * stride + kx - 1;
            dst[ox] = (ix >= 0 && ix < d.w) ? src[ix] : 0.0;
          }
        }
      }
    }
  }
}

// Transposed patch matrix, one row per output pixel; feeds the weight-grad
// product in plain row-major form.
void im2col_t(const double* in, const ConvDims& d, int stride, double* col_t) {
  const int patch = d.patch();
  for (int oy = 0; oy < d.oh; ++oy) {
    for (int ox = 0; ox < d.ow; ++ox) {
      double* row = col_t + (static_cast<std::size_t>(oy) * d.ow + ox) * patch;
      for (int c = 0; c < d.cin; ++c) {
        const double* plane = in + static_cast<std::size_t>(c) * d.h * d.w;
        for (int ky = 0; ky < 3; ++ky) {
          const int iy = oy * stride + ky - 1;
          for (int kx = 0; kx < 3; ++kx) {
            const int ix = ox * stride + kx - 1;
            row[(c * 3 + ky) * 3 + kx] =
                (iy >= 0 && iy < d.h && ix >= 0 && ix < d.w)
                    ? plane[static_cast<std::size_t>(iy) * d.w + ix]
                    : 0.0;
          }
        }
      }
    }
  }
}

void col2im_acc(const double* col, const ConvDims& d, int stride, double* in_grad) {
  for (int c = 0; c < d.cin; ++c) {
    double* plane = in_grad + static_cast<std::size_t>(c) * d.h * d.w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const double* row = col + static_cast<std::size_t>((c * 3 + ky) * 3 + kx) * d.out_plane();
        for (int oy = 0; oy < d.oh; ++oy) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= d.h) continue;
          const double* src = row + static_cast<std::size_t>(oy) * d.ow;
          double* dst = plane + static_cast<std::size_t>(iy) * d.w;
          for (int ox = 0; ox < d.ow; ++ox) {
            const int ix = ox * stride + kx - 1;
            if (ix >= 0 && ix < d.w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& weight, int stride) {
  const ConvDims d = conv_dims(input, weight, stride);
  Tensor out = Tensor::zeros({d.batch, d.cout, d.oh, d.ow});
  std::vector<double> col(static_cast<std::size_t>(d.patch()) * d.out_plane());
  const std::size_t in_stride = static_cast<std::size_t>(d.cin) * d.h * d.w;
  const std::size_t out_stride = static_cast<std::size_t>(d.cout) * d.out_plane();
  for (int b = 0; b < d.batch; ++b) {
    im2col(input.data.data() + b * in_stride, d, stride, col.data());
    gemm_nn_acc(d.cout, static_cast<int>(d.out_plane()), d.patch(), weight.data.data(), col.data(),
                out.data.data() + b * out_stride);
  }
  return out;
}

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& weight, int stride,
                            const Tensor& out_grad) {
  const ConvDims d = conv_dims(input, weight, stride);
  if (out_grad.shape != std::vector<int>{d.batch, d.cout, d.oh, d.ow})
    throw std::invalid_argument("conv2d_backward: out_grad shape " + out_grad.shape_str() +
                                " does not match forward output");
  Conv2dGrads grads{Tensor::zeros(input.shape), Tensor::zeros(weight.shape)};

  const int patch = d.patch();
  const int n_out = static_cast<int>(d.out_plane());
  // Transposed weights so every product below runs in accumulate-row form.
  std::vector<double> w_t(static_cast<std::size_t>(patch) * d.cout);
  for (int o = 0; o < d.cout; ++o)
    for (int p = 0; p < patch; ++p)
      w_t[static_cast<std::size_t>(p) * d.cout + o] = weight.data[static_cast<std::size_t>(o) * patch + p];

  std::vector<double> col_t(static_cast<std::size_t>(n_out) * patch);
  std::vector<double> dcol(static_cast<std::size_t>(patch) * n_out);
  const std::size_t in_stride = static_cast<std::size_t>(d.cin) * d.h * d.w;
  const std::size_t out_stride = static_cast<std::size_t>(d.cout) * d.out_plane();

  for (int b = 0; b < d.batch; ++b) {
    const double* dy = out_grad.data.data() + b * out_stride;
    // dW += dY * col_t
    im2col_t(input.data.data() + b * in_stride, d, stride, col_t.data());
    gemm_nn_acc(d.cout, patch, n_out, dy, col_t.data(), grads.weight_grad.data.data());
    // dX = col2im(W^T * dY)
    std::fill(dcol.begin(), dcol.end(), 0.0);
    gemm_nn_acc(patch, n_out, d.cout, w_t.data(), dy, dcol.data());
    col2im_acc(dcol.data(), d, stride, grads.input_grad.data.data() + b * in_stride);
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Batch normalization
// ---------------------------------------------------------------------------

BatchNormState::BatchNormState(int channels, const std::string& name_prefix)
    : gamma(name_prefix + ".gamma", {channels}, false),
      beta(name_prefix + ".beta", {channels}, false),
      running_mean(Tensor::zeros({channels})),
      running_var(Tensor::zeros({channels})) {
  std::fill(gamma.value.data.begin(), gamma.value.data.end(), 1.0);
}

namespace {
void check_bn_input(const Tensor& input, const BatchNormState& state) {
  if (input.ndim() != 4 || input.dim(1) != state.channels())
    throw std::invalid_argument("batch_norm: input " + input.shape_str() + " does not carry " +
                                std::to_string(state.channels()) + " channels");
}
}  // namespace

Tensor batch_norm_forward(const Tensor& input, BatchNormState& state, Mode mode,
                          BatchNormCache* cache) {
  if (mode == Mode::Eval) return batch_norm_forward_eval(input, state);
  check_bn_input(input, state);
  const int batch = input.dim(0), channels = input.dim(1);
  const std::size_t plane = static_cast<std::size_t>(input.dim(2)) * input.dim(3);
  const std::size_t m = static_cast<std::size_t>(batch) * plane;
  if (m < 2)
    throw std::invalid_argument("batch_norm: train mode needs at least 2 values per channel");

  Tensor out = Tensor::zeros(input.shape);
  if (cache) {
    cache->x_hat = Tensor::zeros(input.shape);
    cache->inv_std.assign(channels, 0.0);
  }
  const std::size_t sample = static_cast<std::size_t>(channels) * plane;
  for (int c = 0; c < channels; ++c) {
    double sum = 0.0;
    for (int b = 0; b < batch; ++b) {
      const double* x = input.data.data() + b * sample + c * plane;
      for (std::size_t i = 0; i < plane; ++i) sum += x[i];
    }
    const double mean = sum / static_cast<double>(m);
    double sq = 0.0;
    for (int b = 0; b < batch; ++b) {
      const double* x = input.data.data() + b * sample + c * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        const double dv = x[i] - mean;
        sq += dv * dv;
      }
    }
    const double var = sq / static_cast<double>(m);  // biased, also for running stats
    const double inv_std = 1.0 / std::sqrt(var + state.epsilon);
    const double g = state.gamma.value.data[c];
    const double bias = state.beta.value.data[c];
    for (int b = 0; b < batch; ++b) {
      const double* x = input.data.data() + b * sample + c * plane;
      double* y = out.data.data() + b * sample + c * plane;
      double* xh = cache ? cache->x_hat.data.data() + b * sample + c * plane : nullptr;
      for (std::size_t i = 0; i < plane; ++i) {
        const double x_hat = (x[i] - mean) * inv_std;
        if (xh) xh[i] = x_hat;
        y[i] = g * x_hat + bias;
      }
    }
    if (cache) cache->inv_std[c] = inv_std;
    state.running_mean.data[c] =
        (1.0 - state.momentum) * state.running_mean.data[c] + state.momentum * mean;
    state.running_var.data[c] =
        (1.0 - state.momentum) * state.running_var.data[c] + state.momentum * var;
  }
  return out;
}

Tensor batch_norm_forward_eval(const Tensor& input, const BatchNormState& state) {
  check_bn_input(input, state);
  const int batch = input.dim(0), channels = input.dim(1);
  const std::size_t plane = static_cast<std::size_t>(input.dim(2)) * input.dim(3);
  const std::size_t sample = static_cast<std::size_t>(channels) * plane;
  Tensor out = Tensor::zeros(input.shape);
  for (int c = 0; c < channels; ++c) {
    const double scale =
        state.gamma.value.data[c] / std::sqrt(state.running_var.data[c] + state.epsilon);
    const double shift = state.beta.value.data[c] - scale * state.running_mean.data[c];
    for (int b = 0; b < batch; ++b) {
      const double* x = input.data.data() + b * sample + c * plane;
      double* y = out.data.data() + b * sample + c * plane;
      for (std::size_t i = 0; i < plane; ++i) y[i] = scale * x[i] + shift;
    }
  }
  return out;
}

Tensor batch_norm_backward(const Tensor& out_grad, BatchNormState& state,
                           const BatchNormCache& cache) {
  check_bn_input(out_grad, state);
  const int batch = out_grad.dim(0), channels = out_grad.dim(1);
  const std::size_t plane = static_cast<std::size_t>(out_grad.dim(2)) * out_grad.dim(3);
  const std::size_t sample = static_cast<std::size_t>(channels) * plane;
  const double m = static_cast<double>(batch) * static_cast<double>(plane);

  Tensor in_grad = Tensor::zeros(out_grad.shape);
  for (int c = 0; c < channels; ++c) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (int b = 0; b < batch; ++b) {
      const double* dy = out_grad.data.data() + b * sample + c * plane;
      const double* xh = cache.x_hat.data.data() + b * sample + c * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        sum_dy += dy[i];
        sum_dy_xhat += dy[i] * xh[i];
      }
    }
    state.beta.grad.data[c] += sum_dy;
    state.gamma.grad.data[c] += sum_dy_xhat;

    const double g_inv_std = state.gamma.value.data[c] * cache.inv_std[c];
    const double mean_dy = sum_dy / m;
    const double mean_dy_xhat = sum_dy_xhat / m;
    for (int b = 0; b < batch; ++b) {
      const double* dy = out_grad.data.data() + b * sample + c * plane;
      const double* xh = cache.x_hat.data.data() + b * sample + c * plane;
      double* dx = in_grad.data.data() + b * sample + c * plane;
      for (std::size_t i = 0; i < plane; ++i)
        dx[i] = g_inv_std * (dy[i] - mean_dy - xh[i] * mean_dy_xhat);
    }
  }
  return in_grad;
}

// ---------------------------------------------------------------------------
// Pointwise and head ops
// ---------------------------------------------------------------------------

Tensor relu_forward(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& out_grad) {
  if (!input.same_shape(out_grad))
    throw std::invalid_argument("relu_backward: shape mismatch " + input.shape_str() + " vs " +
                                out_grad.shape_str());
  Tensor in_grad = out_grad;
  for (std::size_t i = 0; i < in_grad.data.size(); ++i)
    if (input.data[i] <= 0.0) in_grad.data[i] = 0.0;
  return in_grad;
}

Tensor global_avg_pool_forward(const Tensor& input) {
  if (input.ndim() != 4) throw std::invalid_argument("global_avg_pool: expected [B,C,H,W]");
  const int batch = input.dim(0), channels = input.dim(1);
  const std::size_t plane = static_cast<std::size_t>(input.dim(2)) * input.dim(3);
  Tensor out = Tensor::zeros({batch, channels});
  for (int b = 0; b < batch; ++b)
    for (int c = 0; c < channels; ++c) {
      const double* x = input.data.data() + (static_cast<std::size_t>(b) * channels + c) * plane;
      double sum = 0.0;
      for (std::size_t i = 0; i < plane; ++i) sum += x[i];
      out.at(b, c) = sum / static_cast<double>(plane);
    }
  return out;
}

Tensor global_avg_pool_backward(const Tensor& out_grad, int height, int width) {
  const int batch = out_grad.dim(0), channels = out_grad.dim(1);
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  Tensor in_grad = Tensor::zeros({batch, channels, height, width});
  for (int b = 0; b < batch; ++b)
    for (int c = 0; c < channels; ++c) {
      const double g = out_grad.at(b, c) / static_cast<double>(plane);
      double* dst = in_grad.data.data() + (static_cast<std::size_t>(b) * channels + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) dst[i] = g;
    }
  return in_grad;
}

Tensor linear_forward(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  if (input.ndim() != 2 || weight.ndim() != 2 || input.dim(1) != weight.dim(1) ||
      bias.dim(0) != weight.dim(0))
    throw std::invalid_argument("linear: incompatible shapes " + input.shape_str() + ", " +
                                weight.shape_str() + ", " + bias.shape_str());
  const int batch = input.dim(0), dim = input.dim(1), classes = weight.dim(0);
  Tensor out = Tensor::zeros({batch, classes});
  for (int b = 0; b < batch; ++b)
    for (int c = 0; c < classes; ++c) {
      const double* x = input.data.data() + static_cast<std::size_t>(b) * dim;
      const double* w = weight.data.data() + static_cast<std::size_t>(c) * dim;
      double acc = bias.data[c];
      for (int d = 0; d < dim; ++d) acc += x[d] * w[d];
      out.at(b, c) = acc;
    }
  return out;
}

LinearGrads linear_backward(const Tensor& input, const Tensor& weight, const Tensor& out_grad) {
  const int batch = input.dim(0), dim = input.dim(1), classes = weight.dim(0);
  LinearGrads grads{Tensor::zeros(input.shape), Tensor::zeros(weight.shape),
                    Tensor::zeros({classes})};
  for (int b = 0; b < batch; ++b) {
    const double* x = input.data.data() + static_cast<std::size_t>(b) * dim;
    double* dx = grads.input_grad.data.data() + static_cast<std::size_t>(b) * dim;
    for (int c = 0; c < classes; ++c) {
      const double dy = out_grad.at(b, c);
      const double* w = weight.data.data() + static_cast<std::size_t>(c) * dim;
      double* dw = grads.weight_grad.data.data() + static_cast<std::size_t>(c) * dim;
      for (int d = 0; d < dim; ++d) {
        dx[d] += dy * w[d];
        dw[d] += dy * x[d];
      }
      grads.bias_grad.data[c] += dy;
    }
  }
  return grads;
}

double softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels,
                             Tensor* logit_grad, Tensor* probs) {
  if (logits.ndim() != 2 || static_cast<std::size_t>(logits.dim(0)) != labels.size())
    throw std::invalid_argument("softmax_cross_entropy: logits " + logits.shape_str() +
                                " vs " + std::to_string(labels.size()) + " labels");
  const int batch = logits.dim(0), classes = logits.dim(1);
  for (int label : labels)
    if (label < 0 || label >= classes)
      throw std::invalid_argument("softmax_cross_entropy: label " + std::to_string(label) +
                                  " outside [0," + std::to_string(classes) + ")");
  if (logit_grad) *logit_grad = Tensor::zeros({batch, classes});
  if (probs) *probs = Tensor::zeros({batch, classes});

  double total = 0.0;
  std::vector<double> row_probs(classes);
  for (int b = 0; b < batch; ++b) {
    const double* row = logits.data.data() + static_cast<std::size_t>(b) * classes;
    const double peak = *std::max_element(row, row + classes);
    double z = 0.0;
    for (int c = 0; c < classes; ++c) {
      row_probs[c] = std::exp(row[c] - peak);
      z += row_probs[c];
    }
    total += std::log(z) + peak - row[labels[b]];
    for (int c = 0; c < classes; ++c) {
      const double p = row_probs[c] / z;
      if (probs) probs->at(b, c) = p;
      if (logit_grad)
        logit_grad->at(b, c) = (p - (c == labels[b] ? 1.0 : 0.0)) / static_cast<double>(batch);
    }
  }
  return total / static_cast<double>(batch);
}

void sgd_step(std::span<Parameter* const> params, double lr, double momentum,
              double weight_decay) {
  for (const Parameter* p : params)
    if (!p->grad.all_finite())
      throw DivergenceError("sgd_step: non-finite gradient in parameter '" + p->name + "'");
  for (Parameter* p : params) {
    const double decay = p->decay ? weight_decay : 0.0;
    for (std::size_t i = 0; i < p->value.data.size(); ++i) {
      double& buf = p->momentum.data[i];
      buf = momentum * buf + p->grad.data[i] + decay * p->value.data[i];
      p->value.data[i] -= lr * buf;
    }
    p->zero_grad();
  }
}

}  // namespace skelact::nn
