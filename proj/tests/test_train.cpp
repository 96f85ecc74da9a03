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

#include <fstream>
#include <random>

#include <doctest.h>

#include "skelact/checkpoint.hpp"
#include "skelact/protocol.hpp"
#include "fixtures.hpp"
#include "grad_check.hpp"

using namespace skelact;
using testing::TempDir;

namespace {

std::vector<LabeledImage> random_set(std::mt19937_64& rng, int count, int classes) {
  std::vector<LabeledImage> set;
  for (int i = 0; i < count; ++i)
    set.push_back({testing::random_image(rng, kCropSize, kCropSize), i % classes});
  return set;
}

TrainConfig tiny_config(int epochs, double lr, int batch = 8) {
  TrainConfig config;
  config.epochs = epochs;
  config.batch_size = batch;
  config.lr_schedule = {{0.0, lr}};
  config.seed = 21;
  return config;
}

std::string file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("TrainConfig validation and schedule lookup") {
  TrainConfig config;  // defaults
  CHECK_NOTHROW(config.validate());
  CHECK(config.lr_at_epoch(0) == 0.1);
  CHECK(config.lr_at_epoch(79) == 0.1);
  CHECK(config.lr_at_epoch(80) == 0.01);
  CHECK(config.lr_at_epoch(119) == 0.01);
  CHECK(config.lr_at_epoch(120) == 0.001);
  CHECK(config.lr_at_epoch(159) == 0.001);

  TrainConfig misordered = config;
  misordered.lr_schedule = {{0.0, 0.1}, {0.7, 0.01}, {0.5, 0.001}};
  CHECK_THROWS_AS(misordered.validate(), std::invalid_argument);
  TrainConfig negative = config;
  negative.lr_schedule = {{0.0, -0.1}};
  CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
  TrainConfig late_start = config;
  late_start.lr_schedule = {{0.25, 0.1}};
  CHECK_THROWS_AS(late_start.validate(), std::invalid_argument);
}

TEST_CASE("lr 0 leaves the parameters bit-identical") {
  std::mt19937_64 rng(301);
  const auto set = random_set(rng, 8, 4);
  ResNetModel model = build_resnet({20, 4, {16, 32, 64}, 9});
  const std::vector<double> stem_before = model.stem.value.data;
  const std::vector<double> fc_before = model.fc_weight.value.data;
  train(model, set, tiny_config(1, 0.0));
  CHECK(model.stem.value.data == stem_before);
  CHECK(model.fc_weight.value.data == fc_before);
}

TEST_CASE("training is deterministic given the seed") {
  TempDir dir("train_det");
  std::mt19937_64 rng(302);
  const auto set = random_set(rng, 12, 3);

  auto run = [&](const std::filesystem::path& path) {
    ResNetModel model = build_resnet({20, 3, {16, 32, 64}, 4});
    const TrainStats stats = train(model, set, tiny_config(2, 0.05));
    save_checkpoint(model, path);
    return stats;
  };
  const TrainStats first = run(dir.path() / "a.ckpt");
  const TrainStats second = run(dir.path() / "b.ckpt");
  CHECK(file_bytes(dir.path() / "a.ckpt") == file_bytes(dir.path() / "b.ckpt"));
  REQUIRE(first.curves.size() == second.curves.size());
  for (std::size_t e = 0; e < first.curves.size(); ++e) {
    CHECK(first.curves[e].mean_loss == second.curves[e].mean_loss);
    CHECK(first.curves[e].train_error == second.curves[e].train_error);
  }
}

TEST_CASE("per-epoch test error lands in the curves when a test set is given") {
  std::mt19937_64 rng(309);
  const auto train_set = random_set(rng, 9, 3);
  const auto test_set = random_set(rng, 6, 3);
  ResNetModel model = build_resnet({20, 3, {16, 32, 64}, 6});
  const TrainStats stats = train(model, train_set, tiny_config(2, 0.01), &test_set);
  REQUIRE(stats.curves.size() == 2);
  for (const auto& epoch : stats.curves) {
    CHECK(epoch.test_error >= 0.0);
    CHECK(epoch.test_error <= 100.0);
  }
  // The recorded final test error matches a fresh evaluation.
  CHECK(stats.curves.back().test_error ==
        doctest::Approx(100.0 - evaluate(model, test_set).accuracy_percent));
}

TEST_CASE("train validates its inputs") {
  std::mt19937_64 rng(303);
  ResNetModel model = build_resnet({20, 4, {16, 32, 64}, 2});
  CHECK_THROWS_AS(train(model, {}, tiny_config(1, 0.1)), DataError);

  auto missing_class = random_set(rng, 6, 3);  // classes 0..2 of 4
  CHECK_THROWS_AS(train(model, missing_class, tiny_config(1, 0.1)), DataError);

  auto bad_label = random_set(rng, 8, 4);
  bad_label[0].label = 17;
  CHECK_THROWS_AS(train(model, bad_label, tiny_config(1, 0.1)), DataError);
}

TEST_CASE("evaluate matches a per-sample recount") {
  std::mt19937_64 rng(304);
  ResNetModel model = build_resnet({20, 4, {16, 32, 64}, 31});
  ModelTrace trace;
  Tensor warmup({4, 3, kInputSize, kInputSize});
  testing::fill_uniform(warmup.data, rng, 0.0, 1.0);
  model.forward(warmup, Mode::Train, &trace);  // sane running stats

  const auto set = random_set(rng, 10, 4);
  const EvalResult result = evaluate(model, set);

  std::int64_t correct = 0;
  std::vector<std::vector<std::int64_t>> confusion(4, std::vector<std::int64_t>(4, 0));
  for (const auto& item : set) {
    Tensor single({1, 3, kInputSize, kInputSize});
    for (int r = 0; r < kCropSize; ++r)
      for (int c = 0; c < kCropSize; ++c)
        for (int ch = 0; ch < 3; ++ch)
          single.at(0, ch, r, c) = item.image.at(r, c, ch) / 255.0;
    const Tensor logits = model.forward_eval(single);
    int best = 0;
    for (int c = 1; c < 4; ++c)
      if (logits.at(0, c) > logits.at(0, best)) best = c;
    ++confusion[item.label][best];
    if (best == item.label) ++correct;
  }
  CHECK(result.confusion == confusion);
  CHECK(result.accuracy_percent == doctest::Approx(100.0 * correct / 10.0).epsilon(1e-9));

  // Row sums count the per-class test items.
  for (int c = 0; c < 4; ++c) {
    std::int64_t row_sum = 0;
    for (std::int64_t v : result.confusion[c]) row_sum += v;
    const auto expected = std::count_if(set.begin(), set.end(),
                                        [c](const auto& item) { return item.label == c; });
    CHECK(row_sum == expected);
  }

  // Relabeling with the predictions yields a perfect diagonal score.
  auto relabeled = set;
  for (auto& item : relabeled) {
    Tensor single({1, 3, kInputSize, kInputSize});
    for (int r = 0; r < kCropSize; ++r)
      for (int c = 0; c < kCropSize; ++c)
        for (int ch = 0; ch < 3; ++ch)
          single.at(0, ch, r, c) = item.image.at(r, c, ch) / 255.0;
    const Tensor logits = model.forward_eval(single);
    int best = 0;
    for (int c = 1; c < 4; ++c)
      if (logits.at(0, c) > logits.at(0, best)) best = c;
    item.label = best;
  }
  const EvalResult perfect = evaluate(model, relabeled);
  CHECK(perfect.accuracy_percent == 100.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(perfect.confusion[i][j] == 0);

  CHECK_THROWS_AS(evaluate(model, {}), DataError);
}

TEST_CASE("three of four correct scores 75 percent") {
  std::mt19937_64 rng(305);
  ResNetModel model = build_resnet({20, 2, {16, 32, 64}, 12});
  ModelTrace trace;
  Tensor warmup({2, 3, kInputSize, kInputSize});
  testing::fill_uniform(warmup.data, rng, 0.0, 1.0);
  model.forward(warmup, Mode::Train, &trace);

  auto set = random_set(rng, 4, 2);
  for (auto& item : set) {  // start from the model's own predictions
    Tensor single({1, 3, kInputSize, kInputSize});
    for (int r = 0; r < kCropSize; ++r)
      for (int c = 0; c < kCropSize; ++c)
        for (int ch = 0; ch < 3; ++ch)
          single.at(0, ch, r, c) = item.image.at(r, c, ch) / 255.0;
    const Tensor logits = model.forward_eval(single);
    item.label = logits.at(0, 1) > logits.at(0, 0) ? 1 : 0;
  }
  set[0].label = 1 - set[0].label;  // break exactly one
  CHECK(evaluate(model, set).accuracy_percent == doctest::Approx(75.0));
}

TEST_CASE("run_protocol trains, evaluates and persists per split") {
  TempDir dir("protocol");
  std::mt19937_64 rng(306);

  // Small in-memory corpus carrying all eight AS1 actions.
  Corpus corpus;
  corpus.dataset = DatasetId::Msr3d;
  const auto proto = ProtocolSpec::msr3d_cross_subject(Msr3dSubset::AS1, {1, 3});
  for (int action : proto.action_ids)
    for (int subject : {1, 2, 3, 4})
      corpus.sequences.push_back(
          testing::random_sequence(rng, 3, 20, DatasetId::Msr3d, action, subject, 1));
  std::sort(corpus.sequences.begin(), corpus.sequences.end(),
            [](const auto& a, const auto& b) { return a.key() < b.key(); });

  TrainConfig config = tiny_config(1, 0.01, 32);
  config.augment = {true, false, false};  // crops only

  ResNetConfig model_config{20, 8, {16, 32, 64}, 77};
  ProtocolRunOptions options;
  options.out_dir = dir.path();
  options.record_timing = false;
  options.record_test_curves = false;

  const ExperimentResult result = run_protocol(corpus, proto, model_config, config, options);
  CHECK(result.dataset == "MSR3D");
  CHECK(result.subset == "AS1");
  CHECK(result.depth == 20);
  REQUIRE(result.per_split_accuracy.size() == 1);
  CHECK(result.mean_accuracy == doctest::Approx(result.per_split_accuracy[0]).epsilon(1e-9));
  CHECK(result.wall_seconds == 0.0);
  REQUIRE(result.curves.size() == 1);

  // The confusion matrix covers exactly the 16 test sequences.
  std::int64_t total = 0;
  for (const auto& row : result.confusion)
    for (std::int64_t v : row) total += v;
  CHECK(total == 16);

  REQUIRE(result.checkpoint_paths.size() == 1);
  CHECK(std::filesystem::exists(dir.path() / result.checkpoint_paths[0]));
  const ResNetModel restored = load_checkpoint(dir.path() / result.checkpoint_paths[0]);
  CHECK(restored.config.num_classes == 8);

  // Augmented variants never reach the evaluation side: the test side sees
  // one view per sequence and the train side is 8 crops per sequence.
  const auto splits = make_split(corpus, proto);
  const auto train_images = make_train_images(corpus, proto, splits[0].train_ids,
                                              PartMap::defaults(DatasetId::Msr3d),
                                              config.augment);
  const auto eval_images = make_eval_images(corpus, proto, splits[0].test_ids,
                                            PartMap::defaults(DatasetId::Msr3d));
  CHECK(train_images.size() == splits[0].train_ids.size() * 8);
  CHECK(eval_images.size() == splits[0].test_ids.size());
}

TEST_CASE("run_protocol persists a failure marker when training diverges") {
  TempDir dir("protocol_fail");
  std::mt19937_64 rng(308);
  Corpus corpus;
  corpus.dataset = DatasetId::Msr3d;
  const auto proto = ProtocolSpec::msr3d_cross_subject(Msr3dSubset::AS1, {1});
  for (int action : proto.action_ids)
    for (int subject : {1, 2})
      corpus.sequences.push_back(
          testing::random_sequence(rng, 3, 20, DatasetId::Msr3d, action, subject, 1));
  std::sort(corpus.sequences.begin(), corpus.sequences.end(),
            [](const auto& a, const auto& b) { return a.key() < b.key(); });

  TrainConfig config = tiny_config(2, 1e200, 16);  // guaranteed blow-up
  config.augment = {true, false, false};
  ProtocolRunOptions options;
  options.out_dir = dir.path();
  options.record_test_curves = false;

  CHECK_THROWS_AS(run_protocol(corpus, proto, {20, 8, {16, 32, 64}, 1}, config, options),
                  DivergenceError);
  CHECK(std::filesystem::exists(dir.path() / "MSR3D_AS1_d20.failed.txt"));
  const std::string marker = file_bytes(dir.path() / "MSR3D_AS1_d20.failed.txt");
  CHECK(marker.find("FAILED at split 0") != std::string::npos);
}

TEST_CASE("run_protocol rejects a class-count mismatch") {
  std::mt19937_64 rng(307);
  Corpus corpus;
  corpus.dataset = DatasetId::Msr3d;
  const auto proto = ProtocolSpec::msr3d_cross_subject(Msr3dSubset::AS1, {1});
  for (int action : proto.action_ids)
    for (int subject : {1, 2})
      corpus.sequences.push_back(
          testing::random_sequence(rng, 2, 20, DatasetId::Msr3d, action, subject, 1));
  ResNetConfig model_config{20, 5, {16, 32, 64}, 0};
  CHECK_THROWS_AS(
      run_protocol(corpus, proto, model_config, tiny_config(1, 0.01), ProtocolRunOptions{}),
      DataError);
}
