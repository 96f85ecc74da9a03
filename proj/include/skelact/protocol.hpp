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
#ifndef SKELACT_PROTOCOL_HPP
#define SKELACT_PROTOCOL_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skelact/dataset.hpp"
#include "skelact/encoder.hpp"
#include "skelact/train.hpp"

namespace skelact {

struct ExperimentResult {
  std::string dataset;
  std::string subset;
  std::string experiment;  // "A"/"B"/"C" or empty
  int depth = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> class_names;
  std::vector<double> per_split_accuracy;              // percent
  double mean_accuracy = 0.0;
  std::vector<std::vector<std::int64_t>> confusion;    // summed over splits
  std::vector<std::pair<double, double>> curves;       // per-epoch (train_err, test_err) %, split means
  std::vector<std::string> checkpoint_paths;
  double wall_seconds = 0.0;
};

struct ProtocolRunOptions {
  std::filesystem::path out_dir;      // checkpoints and per-split records land here
  std::optional<PartMap> part_map;    // default: PartMap::defaults(dataset)
  bool record_timing = true;          // false pins wall_seconds to 0 for reproducible output
  bool record_test_curves = true;     // per-epoch test error (costs one eval per epoch)
  std::optional<int> only_split;      // restrict to one split index
};

/// Runs one protocol end to end: split -> encode -> augment (train side
/// only) -> train a fresh model per split -> evaluate center-crop test
/// views; aggregates accuracies and persists checkpoints. A disjointness
/// check on every split guards against train/test leakage.
ExperimentResult run_protocol(const Corpus& corpus, const ProtocolSpec& proto,
                              const ResNetConfig& model_config, const TrainConfig& train_config,
                              const ProtocolRunOptions& options);

/// Encodes and labels the given sequences: augmented variants for the train
/// role, the single center-crop view for the test role.
std::vector<LabeledImage> make_train_images(const Corpus& corpus, const ProtocolSpec& proto,
                                            const std::vector<SequenceKey>& ids,
                                            const PartMap& part_map, const AugmentPolicy& policy);
std::vector<LabeledImage> make_eval_images(const Corpus& corpus, const ProtocolSpec& proto,
                                           const std::vector<SequenceKey>& ids,
                                           const PartMap& part_map);

}  // namespace skelact

#endif  // SKELACT_PROTOCOL_HPP
