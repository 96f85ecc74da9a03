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

#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "skelact/common.hpp"
#include "grad_check.hpp"
#include "nn_oracles.hpp"

using namespace skelact::nn;
using skelact::testing::check_gradient;
using skelact::testing::fill_uniform;
using skelact::testing::random_projection;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void expect_close(const Tensor& a, const Tensor& b, double tol = 1e-12) {
  REQUIRE(a.shape == b.shape);
  for (std::size_t i = 0; i < a.data.size(); ++i)
    REQUIRE(a.data[i] == doctest::Approx(b.data[i]).epsilon(tol).scale(1.0));
}

}  // namespace

TEST_CASE("conv2d forward agrees with the nested-loop oracle") {
  std::mt19937_64 rng(100);
  struct Shape {
    int b, cin, h, w, cout, stride;
  };
  const Shape shapes[] = {{1, 2, 4, 4, 3, 1}, {2, 3, 6, 6, 4, 1}, {1, 2, 4, 4, 4, 2},
                          {2, 1, 6, 4, 2, 2}, {3, 4, 5, 3, 2, 1}, {1, 3, 8, 8, 6, 2}};
  for (const auto& s : shapes) {
    Tensor input({s.b, s.cin, s.h, s.w});
    Tensor weight({s.cout, s.cin, 3, 3});
    fill_uniform(input.data, rng);
    fill_uniform(weight.data, rng);
    const Tensor ours = conv2d_forward(input, weight, s.stride);
    const Tensor ref = skelact::testing::conv2d_oracle(input, weight, s.stride);
    expect_close(ours, ref);
  }
}

TEST_CASE("conv2d identity kernel and zero weights") {
  std::mt19937_64 rng(101);
  Tensor input({1, 2, 4, 4});
  fill_uniform(input.data, rng);

  // Center-tap kernel that copies channel 0 and channel 1 into two outputs.
  Tensor weight = Tensor::zeros({2, 2, 3, 3});
  weight.at(0, 0, 1, 1) = 1.0;
  weight.at(1, 1, 1, 1) = 1.0;
  const Tensor out = conv2d_forward(input, weight, 1);
  expect_close(out, input);

  const Tensor zeros = conv2d_forward(input, Tensor::zeros({3, 2, 3, 3}), 1);
  for (double v : zeros.data) CHECK(v == 0.0);
}

TEST_CASE("conv2d rejects bad shapes") {
  CHECK_THROWS_WITH_AS(
      conv2d_forward(Tensor::zeros({1, 2, 4, 4}), Tensor::zeros({3, 5, 3, 3}), 1),
      doctest::Contains("[3,5,3,3]"), std::invalid_argument);
  CHECK_THROWS_AS(conv2d_forward(Tensor::zeros({1, 2, 5, 4}), Tensor::zeros({2, 2, 3, 3}), 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(conv2d_forward(Tensor::zeros({1, 2, 4, 4}), Tensor::zeros({2, 2, 3, 3}), 3),
                  std::invalid_argument);
}

TEST_CASE("conv2d backward special cases") {
  std::mt19937_64 rng(102);
  Tensor input({1, 2, 4, 4});
  Tensor weight({2, 2, 3, 3});
  fill_uniform(input.data, rng);
  fill_uniform(weight.data, rng);

  const auto zero_grads =
      conv2d_backward(input, weight, 1, Tensor::zeros({1, 2, 4, 4}));
  for (double v : zero_grads.input_grad.data) CHECK(v == 0.0);
  for (double v : zero_grads.weight_grad.data) CHECK(v == 0.0);

  // One upstream pixel: the weight gradient is the input patch under it.
  Tensor single = Tensor::zeros({1, 2, 4, 4});
  single.at(0, 1, 2, 2) = 1.0;
  const auto grads = conv2d_backward(input, weight, 1, single);
  for (int ic = 0; ic < 2; ++ic)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) {
        CHECK(grads.weight_grad.at(1, ic, ky, kx) ==
              doctest::Approx(input.at(0, ic, 2 + ky - 1, 2 + kx - 1)));
        CHECK(grads.weight_grad.at(0, ic, ky, kx) == 0.0);  // untouched output channel
      }
}

TEST_CASE("conv2d backward passes finite differences") {
  std::mt19937_64 rng(103);
  struct Shape {
    int b, cin, h, w, cout, stride;
  };
  const Shape shapes[] = {{1, 2, 4, 4, 3, 1}, {2, 2, 4, 4, 2, 2}, {1, 3, 6, 6, 2, 1},
                          {2, 1, 4, 6, 3, 2}, {1, 2, 6, 4, 2, 1}};
  for (const auto& s : shapes) {
    Tensor input({s.b, s.cin, s.h, s.w});
    Tensor weight({s.cout, s.cin, 3, 3});
    fill_uniform(input.data, rng);
    fill_uniform(weight.data, rng);
    const Tensor probe = conv2d_forward(input, weight, s.stride);
    const auto proj = random_projection(probe.data.size(), rng);
    const Tensor out_grad = Tensor::from(probe.shape, proj);
    const auto grads = conv2d_backward(input, weight, s.stride, out_grad);

    auto loss = [&] { return dot(conv2d_forward(input, weight, s.stride).data, proj); };
    CHECK(check_gradient(loss, input.data, grads.input_grad.data) <= 1e-4);
    CHECK(check_gradient(loss, weight.data, grads.weight_grad.data) <= 1e-4);
  }
}

TEST_CASE("batch norm normalizes per channel in train mode") {
  std::mt19937_64 rng(104);
  Tensor input({4, 3, 5, 5});
  fill_uniform(input.data, rng, -3.0, 7.0);
  BatchNormState state(3);
  const Tensor out = batch_norm_forward(input, state, Mode::Train);
  const std::size_t plane = 25, sample = 3 * plane;
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0, sq = 0.0;
    for (int b = 0; b < 4; ++b)
      for (std::size_t i = 0; i < plane; ++i) {
        const double v = out.data[b * sample + c * plane + i];
        sum += v;
        sq += v * v;
      }
    const double mean = sum / 100.0;
    const double var = sq / 100.0 - mean * mean;
    CHECK(std::fabs(mean) < 1e-5);
    CHECK(std::fabs(var - 1.0) < 1e-3);  // epsilon shifts the variance slightly
  }

  // gamma = 0 blanks the output.
  std::fill(state.gamma.value.data.begin(), state.gamma.value.data.end(), 0.0);
  std::fill(state.beta.value.data.begin(), state.beta.value.data.end(), 0.0);
  for (double v : batch_norm_forward(input, state, Mode::Train).data) CHECK(v == 0.0);

  CHECK_THROWS_AS(batch_norm_forward(Tensor::zeros({1, 3, 1, 1}), state, Mode::Train),
                  std::invalid_argument);
}

TEST_CASE("batch norm updates running statistics") {
  Tensor input = Tensor::from({2, 1, 1, 2}, {1.0, 3.0, 5.0, 7.0});
  BatchNormState state(1);
  batch_norm_forward(input, state, Mode::Train);
  // batch mean 4, biased variance 5; running starts at zero, momentum 0.1.
  CHECK(state.running_mean.data[0] == doctest::Approx(0.4));
  CHECK(state.running_var.data[0] == doctest::Approx(0.5));
  batch_norm_forward(input, state, Mode::Train);
  CHECK(state.running_mean.data[0] == doctest::Approx(0.9 * 0.4 + 0.4));
}

TEST_CASE("batch norm eval mode is a per-channel affine map") {
  std::mt19937_64 rng(105);
  BatchNormState state(2);
  fill_uniform(state.running_mean.data, rng);
  fill_uniform(state.running_var.data, rng, 0.5, 2.0);
  fill_uniform(state.gamma.value.data, rng, 0.5, 1.5);
  fill_uniform(state.beta.value.data, rng);

  Tensor a({2, 2, 3, 3});
  fill_uniform(a.data, rng);
  Tensor b = a;
  const double shift = 0.73;
  for (double& v : b.data) v += shift;

  const Tensor ya = batch_norm_forward_eval(a, state);
  const Tensor yb = batch_norm_forward_eval(b, state);
  const std::size_t plane = 9, sample = 2 * plane;
  for (int batch = 0; batch < 2; ++batch)
    for (int c = 0; c < 2; ++c) {
      const double scale =
          state.gamma.value.data[c] / std::sqrt(state.running_var.data[c] + state.epsilon);
      for (std::size_t i = 0; i < plane; ++i) {
        const std::size_t idx = batch * sample + c * plane + i;
        CHECK(yb.data[idx] - ya.data[idx] == doctest::Approx(scale * shift));
      }
    }
}

TEST_CASE("batch norm backward passes finite differences") {
  std::mt19937_64 rng(106);
  struct Shape {
    int b, c, h, w;
  };
  const Shape shapes[] = {{2, 3, 4, 4}, {4, 1, 2, 3}, {2, 2, 1, 5}, {3, 4, 2, 2}, {5, 2, 3, 1}};
  for (const auto& s : shapes) {
    Tensor input({s.b, s.c, s.h, s.w});
    fill_uniform(input.data, rng, -2.0, 2.0);
    BatchNormState state(s.c);
    fill_uniform(state.gamma.value.data, rng, 0.5, 1.5);
    fill_uniform(state.beta.value.data, rng);

    BatchNormCache cache;
    const Tensor probe = batch_norm_forward(input, state, Mode::Train, &cache);
    const auto proj = random_projection(probe.data.size(), rng);
    state.gamma.zero_grad();
    state.beta.zero_grad();
    const Tensor in_grad =
        batch_norm_backward(Tensor::from(probe.shape, proj), state, cache);

    auto loss = [&] {
      return dot(batch_norm_forward(input, state, Mode::Train).data, proj);
    };
    CHECK(check_gradient(loss, input.data, in_grad.data) <= 1e-4);
    CHECK(check_gradient(loss, state.gamma.value.data, state.gamma.grad.data) <= 1e-4);
    CHECK(check_gradient(loss, state.beta.value.data, state.beta.grad.data) <= 1e-4);
  }
}

TEST_CASE("relu basics and finite differences") {
  Tensor nonneg = Tensor::from({1, 4}, {0.0, 1.0, 2.5, 7.0});
  expect_close(relu_forward(nonneg), nonneg);
  Tensor negative = Tensor::from({1, 3}, {-1.0, -0.5, -7.0});
  for (double v : relu_forward(negative).data) CHECK(v == 0.0);

  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 5; ++trial) {
    Tensor input({2, 3 + trial});
    fill_uniform(input.data, rng, -2.0, 2.0);
    for (double& v : input.data)  // keep coordinates away from the kink
      if (std::fabs(v) < 0.1) v = v < 0 ? -0.1 : 0.1;
    const auto proj = random_projection(input.data.size(), rng);
    const Tensor in_grad = relu_backward(input, Tensor::from(input.shape, proj));
    auto loss = [&] { return dot(relu_forward(input).data, proj); };
    CHECK(check_gradient(loss, input.data, in_grad.data) <= 1e-4);
  }
}

TEST_CASE("global average pool") {
  Tensor constant = Tensor::zeros({1, 2, 3, 3});
  std::fill(constant.data.begin(), constant.data.begin() + 9, 4.0);
  std::fill(constant.data.begin() + 9, constant.data.end(), -1.5);
  const Tensor pooled = global_avg_pool_forward(constant);
  CHECK(pooled.at(0, 0) == doctest::Approx(4.0));
  CHECK(pooled.at(0, 1) == doctest::Approx(-1.5));

  std::mt19937_64 rng(108);
  Tensor single({2, 3, 1, 1});
  fill_uniform(single.data, rng);
  expect_close(global_avg_pool_forward(single), Tensor::from({2, 3}, single.data));

  for (int trial = 0; trial < 5; ++trial) {
    Tensor input({2, 2, 2 + trial, 3});
    fill_uniform(input.data, rng);
    expect_close(global_avg_pool_forward(input), skelact::testing::gap_oracle(input));
    const auto proj = random_projection(4, rng);
    const Tensor in_grad =
        global_avg_pool_backward(Tensor::from({2, 2}, proj), input.dim(2), 3);
    auto loss = [&] { return dot(global_avg_pool_forward(input).data, proj); };
    CHECK(check_gradient(loss, input.data, in_grad.data) <= 1e-4);
  }
}

TEST_CASE("linear layer") {
  // Identity weights pass the input through.
  Tensor eye = Tensor::zeros({3, 3});
  for (int i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
  std::mt19937_64 rng(109);
  Tensor input({2, 3});
  fill_uniform(input.data, rng);
  expect_close(linear_forward(input, eye, Tensor::zeros({3})), input);

  // Zero input broadcasts the bias.
  Tensor bias = Tensor::from({3}, {1.0, -2.0, 0.5});
  const Tensor broadcast = linear_forward(Tensor::zeros({2, 3}), eye, bias);
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 3; ++c) CHECK(broadcast.at(b, c) == bias.data[c]);

  for (int trial = 0; trial < 5; ++trial) {
    Tensor x({2, 4 + trial});
    Tensor w({3, 4 + trial});
    Tensor b({3});
    fill_uniform(x.data, rng);
    fill_uniform(w.data, rng);
    fill_uniform(b.data, rng);
    expect_close(linear_forward(x, w, b), skelact::testing::linear_oracle(x, w, b));

    const auto proj = random_projection(6, rng);
    const auto grads = linear_backward(x, w, Tensor::from({2, 3}, proj));
    auto loss = [&] { return dot(linear_forward(x, w, b).data, proj); };
    CHECK(check_gradient(loss, x.data, grads.input_grad.data) <= 1e-4);
    CHECK(check_gradient(loss, w.data, grads.weight_grad.data) <= 1e-4);
    CHECK(check_gradient(loss, b.data, grads.bias_grad.data) <= 1e-4);
  }
}

TEST_CASE("softmax cross entropy values") {
  // Uniform logits cost ln(C).
  const Tensor uniform = Tensor::zeros({2, 8});
  CHECK(softmax_cross_entropy(uniform, {3, 5}) == doctest::Approx(std::log(8.0)).epsilon(1e-12));

  // A dominant true logit drives the loss to zero.
  Tensor confident = Tensor::zeros({1, 8});
  confident.at(0, 2) = 50.0;
  CHECK(softmax_cross_entropy(confident, {2}) < 1e-15);

  CHECK_THROWS_AS(softmax_cross_entropy(uniform, {3, 8}), std::invalid_argument);
  CHECK_THROWS_AS(softmax_cross_entropy(uniform, {-1, 0}), std::invalid_argument);

  // Probabilities sum to one per row.
  std::mt19937_64 rng(110);
  Tensor logits({4, 6});
  fill_uniform(logits.data, rng, -5.0, 5.0);
  Tensor probs;
  softmax_cross_entropy(logits, {0, 1, 2, 3}, nullptr, &probs);
  for (int b = 0; b < 4; ++b) {
    double sum = 0.0;
    for (int c = 0; c < 6; ++c) sum += probs.at(b, c);
    CHECK(std::fabs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("softmax cross entropy gradient passes finite differences") {
  std::mt19937_64 rng(111);
  for (int trial = 0; trial < 5; ++trial) {
    const int batch = 2 + trial % 3, classes = 3 + trial;
    Tensor logits({batch, classes});
    fill_uniform(logits.data, rng, -2.0, 2.0);
    std::vector<int> labels(batch);
    for (auto& l : labels) l = static_cast<int>(rng() % classes);

    Tensor grad;
    softmax_cross_entropy(logits, labels, &grad);
    auto loss = [&] { return softmax_cross_entropy(logits, labels); };
    CHECK(check_gradient(loss, logits.data, grad.data) <= 1e-4);
  }
}

TEST_CASE("sgd step follows the momentum recurrence") {
  Parameter p("p", {2}, true);
  p.value.data = {1.0, -2.0};
  std::vector<Parameter*> params = {&p};

  // No gradient, no decay: nothing moves.
  sgd_step(params, 0.1, 0.9, 0.0);
  CHECK(p.value.data == std::vector<double>{1.0, -2.0});

  // Single plain step: value - lr * grad.
  p.grad.data = {0.5, 0.25};
  sgd_step(params, 0.1, 0.0, 0.0);
  CHECK(p.value.data[0] == doctest::Approx(1.0 - 0.1 * 0.5));
  CHECK(p.value.data[1] == doctest::Approx(-2.0 - 0.1 * 0.25));
  CHECK(p.grad.data == std::vector<double>{0.0, 0.0});  // gradients zeroed

  // Two momentum steps against a hand-unrolled scalar recurrence.
  Parameter q("q", {1}, false);
  q.value.data = {1.0};
  std::vector<Parameter*> qs = {&q};
  double value = 1.0, buffer = 0.0;
  for (int step = 0; step < 2; ++step) {
    q.grad.data = {0.5};
    sgd_step(qs, 0.1, 0.9, 0.0);
    buffer = 0.9 * buffer + 0.5;
    value -= 0.1 * buffer;
  }
  CHECK(q.value.data[0] == value);
  CHECK(q.momentum.data[0] == buffer);

  // Weight decay touches only parameters marked for it.
  Parameter decayed("d", {1}, true);
  Parameter plain("n", {1}, false);
  decayed.value.data = {2.0};
  plain.value.data = {2.0};
  std::vector<Parameter*> both = {&decayed, &plain};
  sgd_step(both, 0.1, 0.0, 0.5);
  CHECK(decayed.value.data[0] == doctest::Approx(2.0 - 0.1 * 0.5 * 2.0));
  CHECK(plain.value.data[0] == 2.0);

  // Non-finite gradients abort.
  decayed.grad.data = {std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(sgd_step(both, 0.1, 0.0, 0.0), skelact::DivergenceError);
}

TEST_CASE("two-block toy network passes an end-to-end gradient check") {
  std::mt19937_64 rng(112);
  Tensor input({2, 2, 6, 6});
  fill_uniform(input.data, rng, -1.0, 1.0);
  Tensor w1({3, 2, 3, 3}), w2({3, 3, 3, 3}), fc_w({4, 3}), fc_b({4});
  fill_uniform(w1.data, rng, -0.5, 0.5);
  fill_uniform(w2.data, rng, -0.5, 0.5);
  fill_uniform(fc_w.data, rng, -0.5, 0.5);
  fill_uniform(fc_b.data, rng, -0.5, 0.5);
  BatchNormState bn1(3), bn2(3);
  fill_uniform(bn1.gamma.value.data, rng, 0.5, 1.5);
  fill_uniform(bn1.beta.value.data, rng, -0.5, 0.5);
  fill_uniform(bn2.gamma.value.data, rng, 0.5, 1.5);
  fill_uniform(bn2.beta.value.data, rng, -0.5, 0.5);
  const std::vector<int> labels = {1, 3};

  auto forward = [&](BatchNormCache* c1, BatchNormCache* c2, Tensor* t1, Tensor* t2,
                     Tensor* t3, Tensor* t4, Tensor* pooled, Tensor* grad) {
    Tensor z1 = conv2d_forward(input, w1, 1);
    Tensor z2 = batch_norm_forward(z1, bn1, Mode::Train, c1);
    Tensor z3 = relu_forward(z2);
    Tensor z4 = conv2d_forward(z3, w2, 1);
    Tensor z5 = batch_norm_forward(z4, bn2, Mode::Train, c2);
    Tensor z6 = relu_forward(z5);
    Tensor z7 = global_avg_pool_forward(z6);
    Tensor logits = linear_forward(z7, fc_w, fc_b);
    const double loss = softmax_cross_entropy(logits, labels, grad);
    if (t1) *t1 = z2;      // relu 1 input
    if (t2) *t2 = z3;      // conv 2 input
    if (t3) *t3 = z5;      // relu 2 input
    if (t4) *t4 = z6;      // pooled input
    if (pooled) *pooled = z7;
    return loss;
  };

  BatchNormCache c1, c2;
  Tensor relu1_in, conv2_in, relu2_in, gap_in, pooled, dlogits;
  forward(&c1, &c2, &relu1_in, &conv2_in, &relu2_in, &gap_in, &pooled, &dlogits);

  bn1.gamma.zero_grad();
  bn1.beta.zero_grad();
  bn2.gamma.zero_grad();
  bn2.beta.zero_grad();
  const LinearGrads fc_grads = linear_backward(pooled, fc_w, dlogits);
  Tensor d = global_avg_pool_backward(fc_grads.input_grad, gap_in.dim(2), gap_in.dim(3));
  d = relu_backward(relu2_in, d);
  d = batch_norm_backward(d, bn2, c2);
  const Conv2dGrads g2 = conv2d_backward(conv2_in, w2, 1, d);
  d = relu_backward(relu1_in, g2.input_grad);
  d = batch_norm_backward(d, bn1, c1);
  const Conv2dGrads g1 = conv2d_backward(input, w1, 1, d);

  auto loss = [&] {
    return forward(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr);
  };
  CHECK(check_gradient(loss, w1.data, g1.weight_grad.data, 1e-3) <= 1e-3);
  CHECK(check_gradient(loss, w2.data, g2.weight_grad.data, 1e-3) <= 1e-3);
  CHECK(check_gradient(loss, bn1.gamma.value.data, bn1.gamma.grad.data, 1e-3) <= 1e-3);
  CHECK(check_gradient(loss, bn1.beta.value.data, bn1.beta.grad.data, 1e-3) <= 1e-3);
  CHECK(check_gradient(loss, bn2.gamma.value.data, bn2.gamma.grad.data, 1e-3) <= 1e-3);
  CHECK(check_gradient(loss, bn2.beta.value.data, bn2.beta.grad.data, 1e-3) <= 1e-3);
  CHECK(check_gradient(loss, fc_w.data, fc_grads.weight_grad.data, 1e-3) <= 1e-3);
  CHECK(check_gradient(loss, fc_b.data, fc_grads.bias_grad.data, 1e-3) <= 1e-3);
  CHECK(check_gradient(loss, input.data, g1.input_grad.data, 1e-3) <= 1e-3);
}
