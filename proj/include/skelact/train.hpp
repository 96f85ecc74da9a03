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
#ifndef SKELACT_TRAIN_HPP
#define SKELACT_TRAIN_HPP

#include <cstdint>
#include <vector>

#include "skelact/augment.hpp"
#include "skelact/image.hpp"
#include "skelact/resnet.hpp"

namespace skelact {

struct LrPoint {
  double epoch_fraction = 0.0;  // in [0,1], strictly increasing
  double lr = 0.0;              // positive
};

struct TrainConfig {
  int epochs = 160;
  int batch_size = 128;
  std::vector<LrPoint> lr_schedule = {{0.0, 0.1}, {0.5, 0.01}, {0.75, 0.001}};
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::uint64_t seed = 1;
  AugmentPolicy augment;

  /// Throws std::invalid_argument on a misordered schedule or bad rates.
  void validate() const;
  double lr_at_epoch(int epoch) const;
};

/// A 32x32 network input with its class label.
struct LabeledImage {
  ImageU8 image;  // kCropSize x kCropSize
  int label = 0;
};

struct EpochStats {
  double train_error = 0.0;  // top-1 error %, from the training passes
  double test_error = 0.0;   // top-1 error %, -1 when no test set given
  double mean_loss = 0.0;
};

struct TrainStats {
  std::vector<EpochStats> curves;
  int epochs_run = 0;
};

/// Shuffled mini-batch SGD with momentum and weight decay, deterministic
/// given config.seed. Pixels feed the network as value/255. Records one
/// EpochStats per epoch; evaluates `test_set` each epoch when given. With
/// `stop_at_zero_train_error`, returns early once an epoch trains clean.
/// Throws DivergenceError (with epoch/batch) on a non-finite loss.
TrainStats train(ResNetModel& model, const std::vector<LabeledImage>& train_set,
                 const TrainConfig& config, const std::vector<LabeledImage>* test_set = nullptr,
                 bool stop_at_zero_train_error = false);

struct EvalResult {
  double accuracy_percent = 0.0;
  std::vector<std::vector<std::int64_t>> confusion;  // [true][predicted]
};

/// Eval-mode argmax classification (ties to the lowest class index).
/// Throws DataError on an empty test set or an out-of-range label.
EvalResult evaluate(const ResNetModel& model, const std::vector<LabeledImage>& test_set);

}  // namespace skelact

#endif  // SKELACT_TRAIN_HPP
