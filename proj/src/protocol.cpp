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
#include "skelact/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <stdexcept>

#include "skelact/checkpoint.hpp"

namespace skelact {
namespace {

using SequenceIndex = std::map<SequenceKey, const SkeletonSequence*>;

SequenceIndex index_corpus(const Corpus& corpus) {
  SequenceIndex index;
  for (const auto& seq : corpus.sequences) index[seq.key()] = &seq;
  return index;
}

const SkeletonSequence& lookup(const SequenceIndex& index, const SequenceKey& key) {
  const auto it = index.find(key);
  if (it == index.end())
    throw DataError("split references missing sequence " + key.to_string());
  return *it->second;
}

void check_no_leakage(const Split& split) {
  // train_ids and test_ids are sorted by construction.
  std::vector<SequenceKey> overlap;
  std::set_intersection(split.train_ids.begin(), split.train_ids.end(), split.test_ids.begin(),
                        split.test_ids.end(), std::back_inserter(overlap));
  if (!overlap.empty())
    throw std::logic_error("protocol leakage: sequence " + overlap.front().to_string() +
                           " appears in both train and test sides");
}

std::string protocol_label(const ProtocolSpec& proto) {
  std::string label = dataset_name(proto.dataset) + "_" + proto.subset_name;
  if (proto.experiment)
    label += std::string("_exp") +
             static_cast<char>('A' + static_cast<int>(*proto.experiment));
  return label;
}

}  // namespace

std::vector<LabeledImage> make_train_images(const Corpus& corpus, const ProtocolSpec& proto,
                                            const std::vector<SequenceKey>& ids,
                                            const PartMap& part_map,
                                            const AugmentPolicy& policy) {
  const SequenceIndex index = index_corpus(corpus);
  std::vector<LabeledImage> images;
  images.reserve(ids.size() * static_cast<std::size_t>(policy.variants_per_image()));
  for (const auto& key : ids) {
    const SkeletonSequence& seq = lookup(index, key);
    const int label = proto.class_index(seq.action_id);
    if (label < 0)
      throw DataError("sequence " + key.to_string() + " is outside the protocol's subset");
    const ImageU8 encoded = encode(seq, part_map);
    for (auto& variant : augment_all(encoded, policy))
      images.push_back({std::move(variant.image), label});
  }
  return images;
}

std::vector<LabeledImage> make_eval_images(const Corpus& corpus, const ProtocolSpec& proto,
                                           const std::vector<SequenceKey>& ids,
                                           const PartMap& part_map) {
  const SequenceIndex index = index_corpus(corpus);
  std::vector<LabeledImage> images;
  images.reserve(ids.size());
  for (const auto& key : ids) {
    const SkeletonSequence& seq = lookup(index, key);
    const int label = proto.class_index(seq.action_id);
    if (label < 0)
      throw DataError("sequence " + key.to_string() + " is outside the protocol's subset");
    images.push_back({eval_view(encode(seq, part_map)), label});
  }
  return images;
}

ExperimentResult run_protocol(const Corpus& corpus, const ProtocolSpec& proto,
                              const ResNetConfig& model_config, const TrainConfig& train_config,
                              const ProtocolRunOptions& options) {
  train_config.validate();
  if (model_config.num_classes != proto.num_classes())
    throw DataError("model num_classes " + std::to_string(model_config.num_classes) +
                    " does not match the protocol's " + std::to_string(proto.num_classes()) +
                    " classes");
  const PartMap part_map =
      options.part_map ? *options.part_map : PartMap::defaults(proto.dataset);

  const auto start = std::chrono::steady_clock::now();
  const std::vector<Split> splits = make_split(corpus, proto);

  ExperimentResult result;
  result.dataset = dataset_name(proto.dataset);
  result.subset = proto.subset_name;
  if (proto.experiment)
    result.experiment = std::string(1, static_cast<char>('A' + static_cast<int>(*proto.experiment)));
  result.depth = model_config.depth;
  result.seed = train_config.seed;
  result.class_names.assign(proto.action_names.begin(), proto.action_names.end());
  result.confusion.assign(proto.num_classes(),
                          std::vector<std::int64_t>(proto.num_classes(), 0));

  if (!options.out_dir.empty()) std::filesystem::create_directories(options.out_dir);
  std::vector<std::vector<EpochStats>> split_curves;

  if (options.only_split && (*options.only_split < 0 ||
                             *options.only_split >= static_cast<int>(splits.size())))
    throw DataError("split index " + std::to_string(*options.only_split) + " outside 0.." +
                    std::to_string(splits.size() - 1));

  // A failure mid-sweep leaves a marker next to whatever already completed.
  auto persist_failure = [&](std::size_t split_index, const char* what) {
    if (options.out_dir.empty()) return;
    std::ofstream marker(options.out_dir /
                         (protocol_label(proto) + "_d" + std::to_string(model_config.depth) +
                          ".failed.txt"));
    marker << "FAILED at split " << split_index << ": " << what << '\n';
    for (std::size_t i = 0; i < result.per_split_accuracy.size(); ++i)
      marker << "completed split " << i << " accuracy " << result.per_split_accuracy[i] << '\n';
  };

  for (std::size_t split_index = 0; split_index < splits.size(); ++split_index) {
    if (options.only_split && *options.only_split != static_cast<int>(split_index)) continue;
    try {
      const Split& split = splits[split_index];
      check_no_leakage(split);

      const std::vector<LabeledImage> train_images =
          make_train_images(corpus, proto, split.train_ids, part_map, train_config.augment);
      const std::vector<LabeledImage> test_images =
          make_eval_images(corpus, proto, split.test_ids, part_map);

      ResNetConfig split_model_config = model_config;
      split_model_config.num_classes = proto.num_classes();
      split_model_config.seed = model_config.seed + split_index;
      ResNetModel model = build_resnet(split_model_config);

      TrainConfig split_train_config = train_config;
      split_train_config.seed = train_config.seed + split_index;
      const TrainStats stats =
          train(model, train_images, split_train_config,
                options.record_test_curves ? &test_images : nullptr);
      split_curves.push_back(stats.curves);

      const EvalResult eval = evaluate(model, test_images);
      result.per_split_accuracy.push_back(eval.accuracy_percent);
      for (std::size_t i = 0; i < eval.confusion.size(); ++i)
        for (std::size_t j = 0; j < eval.confusion.size(); ++j)
          result.confusion[i][j] += eval.confusion[i][j];

      if (!options.out_dir.empty()) {
        const std::filesystem::path ckpt =
            options.out_dir / (protocol_label(proto) + "_d" +
                               std::to_string(model_config.depth) + "_split" +
                               std::to_string(split_index) + ".ckpt");
        const std::filesystem::path tmp = ckpt.string() + ".tmp";
        save_checkpoint(model, tmp);
        std::filesystem::rename(tmp, ckpt);
        result.checkpoint_paths.push_back(ckpt.filename().string());
      }
    } catch (const std::exception& e) {
      persist_failure(split_index, e.what());
      throw;
    }
  }

  double sum = 0.0;
  for (double acc : result.per_split_accuracy) sum += acc;
  result.mean_accuracy = sum / static_cast<double>(result.per_split_accuracy.size());

  // Mean learning curves across splits.
  std::size_t epochs = 0;
  for (const auto& curves : split_curves) epochs = std::max(epochs, curves.size());
  for (std::size_t e = 0; e < epochs; ++e) {
    double train_err = 0.0, test_err = 0.0;
    int n_train = 0, n_test = 0;
    for (const auto& curves : split_curves) {
      if (e >= curves.size()) continue;
      train_err += curves[e].train_error;
      ++n_train;
      if (curves[e].test_error >= 0.0) {
        test_err += curves[e].test_error;
        ++n_test;
      }
    }
    result.curves.emplace_back(n_train ? train_err / n_train : 0.0,
                               n_test ? test_err / n_test : -1.0);
  }

  if (options.record_timing) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    result.wall_seconds = std::chrono::duration<double>(elapsed).count();
  }
  return result;
}

}  // namespace skelact
