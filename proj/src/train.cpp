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
#include "skelact/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "skelact/common.hpp"

namespace skelact {

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be positive");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be positive");
  if (lr_schedule.empty() || lr_schedule.front().epoch_fraction != 0.0)
    throw std::invalid_argument("TrainConfig: lr_schedule must start at epoch fraction 0");
  double prev = -1.0;
  for (const auto& point : lr_schedule) {
    if (point.epoch_fraction < 0.0 || point.epoch_fraction > 1.0 ||
        point.epoch_fraction <= prev)
      throw std::invalid_argument("TrainConfig: epoch fractions must increase strictly in [0,1]");
    // Zero is allowed: it runs the full loop without moving the parameters.
    if (!(point.lr >= 0.0))
      throw std::invalid_argument("TrainConfig: learning rates must be nonnegative");
    prev = point.epoch_fraction;
  }
  if (momentum < 0.0 || momentum >= 1.0)
    throw std::invalid_argument("TrainConfig: momentum must lie in [0,1)");
  if (weight_decay < 0.0) throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
}

double TrainConfig::lr_at_epoch(int epoch) const {
  const double fraction = static_cast<double>(epoch) / static_cast<double>(epochs);
  double lr = lr_schedule.front().lr;
  for (const auto& point : lr_schedule)
    if (point.epoch_fraction <= fraction) lr = point.lr;
  return lr;
}

namespace {

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Pixels enter the network as value/255.
Tensor make_batch(const std::vector<LabeledImage>& set, const std::vector<int>& order,
                  std::size_t from, std::size_t to, std::vector<int>* labels) {
  const int n = static_cast<int>(to - from);
  Tensor batch = Tensor::zeros({n, 3, kCropSize, kCropSize});
  labels->resize(n);
  for (int b = 0; b < n; ++b) {
    const LabeledImage& item = set[order[from + b]];
    if (item.image.height != kCropSize || item.image.width != kCropSize)
      throw std::invalid_argument("train/evaluate: images must be 32x32");
    (*labels)[b] = item.label;
    for (int r = 0; r < kCropSize; ++r)
      for (int c = 0; c < kCropSize; ++c)
        for (int ch = 0; ch < 3; ++ch)
          batch.at(b, ch, r, c) = static_cast<double>(item.image.at(r, c, ch)) / 255.0;
  }
  return batch;
}

int argmax_row(const Tensor& logits, int row) {
  const int classes = logits.dim(1);
  int best = 0;
  for (int c = 1; c < classes; ++c)
    if (logits.at(row, c) > logits.at(row, best)) best = c;  // ties keep the lowest index
  return best;
}

}  // namespace

TrainStats train(ResNetModel& model, const std::vector<LabeledImage>& train_set,
                 const TrainConfig& config, const std::vector<LabeledImage>* test_set,
                 bool stop_at_zero_train_error) {
  config.validate();
  if (train_set.empty()) throw DataError("train: empty training set");
  const int classes = model.config.num_classes;
  std::vector<bool> class_seen(classes, false);
  for (const auto& item : train_set) {
    if (item.label < 0 || item.label >= classes)
      throw DataError("train: label " + std::to_string(item.label) + " outside [0," +
                      std::to_string(classes) + ")");
    class_seen[item.label] = true;
  }
  for (int c = 0; c < classes; ++c)
    if (!class_seen[c])
      throw DataError("train: class " + std::to_string(c) + " has no training samples");

  std::mt19937_64 rng(config.seed);
  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Parameter*> params = model.parameters();

  TrainStats stats;
  std::vector<int> labels;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[uniform_below(rng, i)]);

    const double lr = config.lr_at_epoch(epoch);
    double loss_sum = 0.0;
    std::int64_t correct = 0;
    int batch_index = 0;
    for (std::size_t from = 0; from < order.size(); from += config.batch_size, ++batch_index) {
      const std::size_t to = std::min(order.size(), from + config.batch_size);
      Tensor batch = make_batch(train_set, order, from, to, &labels);

      ModelTrace trace;
      const Tensor logits = model.forward(batch, Mode::Train, &trace);
      Tensor logit_grad;
      const double loss = nn::softmax_cross_entropy(logits, labels, &logit_grad);
      if (!std::isfinite(loss))
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                              ", batch " + std::to_string(batch_index));
      loss_sum += loss * static_cast<double>(to - from);
      for (std::size_t b = 0; b < labels.size(); ++b)
        if (argmax_row(logits, static_cast<int>(b)) == labels[b]) ++correct;

      model.backward(logit_grad, trace);
      nn::sgd_step(params, lr, config.momentum, config.weight_decay);
    }

    EpochStats epoch_stats;
    epoch_stats.mean_loss = loss_sum / static_cast<double>(train_set.size());
    epoch_stats.train_error =
        100.0 * (1.0 - static_cast<double>(correct) / static_cast<double>(train_set.size()));
    epoch_stats.test_error = -1.0;
    if (test_set && !test_set->empty())
      epoch_stats.test_error = 100.0 - evaluate(model, *test_set).accuracy_percent;
    stats.curves.push_back(epoch_stats);
    stats.epochs_run = epoch + 1;
    if (stop_at_zero_train_error && correct == static_cast<std::int64_t>(train_set.size()))
      break;
  }
  return stats;
}

EvalResult evaluate(const ResNetModel& model, const std::vector<LabeledImage>& test_set) {
  if (test_set.empty()) throw DataError("evaluate: empty test set");
  const int classes = model.config.num_classes;
  for (const auto& item : test_set)
    if (item.label < 0 || item.label >= classes)
      throw DataError("evaluate: label " + std::to_string(item.label) + " outside [0," +
                      std::to_string(classes) + ")");

  EvalResult result;
  result.confusion.assign(classes, std::vector<std::int64_t>(classes, 0));
  std::vector<int> order(test_set.size());
  std::iota(order.begin(), order.end(), 0);

  constexpr std::size_t kEvalBatch = 128;
  std::vector<int> labels;
  std::int64_t correct = 0;
  for (std::size_t from = 0; from < test_set.size(); from += kEvalBatch) {
    const std::size_t to = std::min(test_set.size(), from + kEvalBatch);
    const Tensor batch = make_batch(test_set, order, from, to, &labels);
    const Tensor logits = model.forward_eval(batch);
    for (std::size_t b = 0; b < labels.size(); ++b) {
      const int predicted = argmax_row(logits, static_cast<int>(b));
      ++result.confusion[labels[b]][predicted];
      if (predicted == labels[b]) ++correct;
    }
  }
  result.accuracy_percent =
      100.0 * static_cast<double>(correct) / static_cast<double>(test_set.size());
  return result;
}

}  // namespace skelact
