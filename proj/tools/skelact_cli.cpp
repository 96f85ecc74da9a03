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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skelact/checkpoint.hpp"
#include "skelact/dataset.hpp"
#include "skelact/image_io.hpp"
#include "skelact/protocol.hpp"
#include "skelact/report.hpp"

namespace {

using nlohmann::json;
using namespace skelact;

struct Settings {
  TrainConfig train;
  std::string partmap_path;
  std::vector<int> train_subjects = {1, 3, 5, 7, 9};
  int kard_repeats = 10;
  std::uint64_t split_seed = 7;
  std::string exclude_path;
  bool timing = true;
  bool test_curves = true;

  // CLI-level selections.
  std::string dataset;
  std::string subset;
  std::string experiment;
  int depth = 20;
  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  std::string input;
  std::string out = "out";
};

void load_config_file(Settings& s) {
  if (s.config_path.empty()) return;
  std::ifstream in(s.config_path);
  if (!in) throw DataError("cannot open config file: " + s.config_path);
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw DataError("malformed config file: " + s.config_path);

  s.train.epochs = j.value("epochs", s.train.epochs);
  s.train.batch_size = j.value("batch_size", s.train.batch_size);
  if (j.contains("lr_schedule")) {
    s.train.lr_schedule.clear();
    for (const auto& pair : j["lr_schedule"])
      s.train.lr_schedule.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
  }
  s.train.momentum = j.value("momentum", s.train.momentum);
  s.train.weight_decay = j.value("weight_decay", s.train.weight_decay);
  s.train.seed = j.value("seed", s.train.seed);
  if (j.contains("augment")) {
    const auto& a = j["augment"];
    s.train.augment.crops_enabled = a.value("crops", s.train.augment.crops_enabled);
    s.train.augment.flips_enabled = a.value("flips", s.train.augment.flips_enabled);
    s.train.augment.color_enabled = a.value("color", s.train.augment.color_enabled);
  }
  s.partmap_path = j.value("partmap", s.partmap_path);
  s.train_subjects = j.value("train_subjects", s.train_subjects);
  s.kard_repeats = j.value("kard_repeats", s.kard_repeats);
  s.split_seed = j.value("split_seed", s.split_seed);
  s.exclude_path = j.value("exclude", s.exclude_path);
  s.timing = j.value("timing", s.timing);
  s.test_curves = j.value("test_curves", s.test_curves);
}

void finish_settings(Settings& s) {
  load_config_file(s);
  if (s.seed_flag) s.train.seed = *s.seed_flag;  // flags beat the config file
}

Corpus load_corpus(const Settings& s) {
  if (s.input.empty()) throw DataError("--input directory is required");
  const DatasetId id = dataset_from_name(s.dataset);
  ParseOptions options;
  if (!s.exclude_path.empty()) options.exclusions = read_exclusion_list(s.exclude_path);
  Corpus corpus = parse_corpus(s.input, id, options);
  std::fprintf(stderr, "parsed %zu sequences (%d files seen, %zu rejected, %zu invalid, %zu excluded)\n",
               corpus.sequences.size(), corpus.report.files_seen, corpus.report.rejected.size(),
               corpus.report.filtered_invalid.size(), corpus.report.excluded.size());
  for (const auto& [path, reason] : corpus.report.rejected)
    std::fprintf(stderr, "  rejected %s: %s\n", path.c_str(), reason.c_str());
  return corpus;
}

PartMap resolve_partmap(const Settings& s, DatasetId dataset) {
  if (!s.partmap_path.empty()) return PartMap::load(s.partmap_path);
  return PartMap::defaults(dataset);
}

std::vector<KardExperiment> selected_experiments(const Settings& s) {
  if (s.experiment.empty())
    return {KardExperiment::A, KardExperiment::B, KardExperiment::C};
  if (s.experiment == "A") return {KardExperiment::A};
  if (s.experiment == "B") return {KardExperiment::B};
  if (s.experiment == "C") return {KardExperiment::C};
  throw DataError("unknown experiment '" + s.experiment + "' (expected A, B or C)");
}

ProtocolSpec build_protocol(const Settings& s, const std::string& subset,
                            std::optional<KardExperiment> experiment) {
  const DatasetId id = dataset_from_name(s.dataset);
  if (id == DatasetId::Msr3d) {
    Msr3dSubset which;
    if (subset == "AS1") which = Msr3dSubset::AS1;
    else if (subset == "AS2") which = Msr3dSubset::AS2;
    else if (subset == "AS3") which = Msr3dSubset::AS3;
    else throw DataError("unknown MSR3D subset '" + subset + "' (expected AS1, AS2 or AS3)");
    return ProtocolSpec::msr3d_cross_subject(which, s.train_subjects);
  }
  KardActivitySet set;
  if (subset == "ActivitySet1" || subset == "AS1") set = KardActivitySet::Set1;
  else if (subset == "ActivitySet2" || subset == "AS2") set = KardActivitySet::Set2;
  else if (subset == "ActivitySet3" || subset == "AS3") set = KardActivitySet::Set3;
  else throw DataError("unknown KARD set '" + subset + "' (expected ActivitySet1..3)");
  if (!experiment) throw DataError("KARD protocols need --experiment A|B|C");
  return ProtocolSpec::kard(set, *experiment, s.kard_repeats, s.split_seed);
}

std::vector<std::string> selected_subsets(const Settings& s) {
  if (!s.subset.empty()) return {s.subset};
  if (dataset_from_name(s.dataset) == DatasetId::Msr3d) return {"AS1", "AS2", "AS3"};
  return {"ActivitySet1", "ActivitySet2", "ActivitySet3"};
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_encode(const Settings& s) {
  const Corpus corpus = load_corpus(s);
  const PartMap part_map = resolve_partmap(s, corpus.dataset);
  std::filesystem::create_directories(s.out);
  std::vector<ManifestEntry> manifest;
  for (const auto& seq : corpus.sequences) {
    const std::string name = seq.key().to_string() + ".png";
    write_png_rgb8(encode(seq, part_map), std::filesystem::path(s.out) / name);
    manifest.push_back({name, seq.action_id, seq.subject_id, seq.episode_id, "unassigned", ""});
  }
  write_manifest(manifest, std::filesystem::path(s.out) / "manifest.txt");
  part_map.save(std::filesystem::path(s.out) / "partmap.txt");
  std::printf("encoded %zu images into %s\n", manifest.size(), s.out.c_str());
  return 0;
}

int cmd_augment(const Settings& s) {
  if (s.input.empty()) throw DataError("--input directory is required");
  const std::filesystem::path in_dir = s.input;
  const auto entries = read_manifest(in_dir / "manifest.txt");
  if (entries.empty()) throw DataError("empty manifest in " + s.input);
  std::filesystem::create_directories(s.out);
  std::vector<ManifestEntry> manifest;
  for (const auto& entry : entries) {
    const ImageU8 img = read_png_rgb8(in_dir / entry.image_path);
    const std::string stem = std::filesystem::path(entry.image_path).stem().string();
    for (const auto& variant : augment_all(img, s.train.augment)) {
      const std::string name = stem + "." + variant.variant + ".png";
      write_png_rgb8(variant.image, std::filesystem::path(s.out) / name);
      manifest.push_back({name, entry.action, entry.subject, entry.episode, entry.split_role,
                          variant.variant});
    }
  }
  write_manifest(manifest, std::filesystem::path(s.out) / "manifest.txt");
  std::printf("wrote %zu augmented images into %s\n", manifest.size(), s.out.c_str());
  return 0;
}

int run_protocols(const Settings& s, std::optional<int> only_split) {
  const Corpus corpus = load_corpus(s);
  const PartMap part_map = resolve_partmap(s, corpus.dataset);
  const bool is_kard = corpus.dataset == DatasetId::Kard;

  std::vector<ProtocolSpec> protocols;
  for (const auto& subset : selected_subsets(s)) {
    if (is_kard) {
      for (KardExperiment exp : selected_experiments(s))
        protocols.push_back(build_protocol(s, subset, exp));
    } else {
      protocols.push_back(build_protocol(s, subset, std::nullopt));
    }
  }

  ResNetConfig model_config;
  model_config.depth = s.depth;
  model_config.seed = s.train.seed;

  ProtocolRunOptions options;
  options.out_dir = s.out;
  options.part_map = part_map;
  options.record_timing = s.timing;
  options.record_test_curves = s.test_curves;
  options.only_split = only_split;

  std::vector<ExperimentResult> results;
  for (const auto& proto : protocols) {
    model_config.num_classes = proto.num_classes();
    std::fprintf(stderr, "running %s %s depth %d...\n", proto.subset_name.c_str(),
                 proto.experiment ? "" : "(cross-subject)", s.depth);
    results.push_back(run_protocol(corpus, proto, model_config, s.train, options));
    std::printf("%s depth %d: mean accuracy %s%%\n", proto.subset_name.c_str(), s.depth,
                format_percent(results.back().mean_accuracy).c_str());
  }
  write_report(results, s.out, s.timing);
  std::printf("report written to %s\n", s.out.c_str());
  return 0;
}

int cmd_evaluate(const Settings& s, const std::string& checkpoint, int split_index) {
  const Corpus corpus = load_corpus(s);
  const PartMap part_map = resolve_partmap(s, corpus.dataset);
  if (s.subset.empty()) throw DataError("--subset is required for evaluate");
  std::optional<KardExperiment> exp;
  if (corpus.dataset == DatasetId::Kard) exp = selected_experiments(s).front();
  const ProtocolSpec proto = build_protocol(s, s.subset, exp);

  const std::vector<Split> splits = make_split(corpus, proto);
  if (split_index < 0 || split_index >= static_cast<int>(splits.size()))
    throw DataError("split index outside 0.." + std::to_string(splits.size() - 1));
  const ResNetModel model = load_checkpoint(checkpoint);
  if (model.config.num_classes != proto.num_classes())
    throw DataError("checkpoint has " + std::to_string(model.config.num_classes) +
                    " classes, protocol needs " + std::to_string(proto.num_classes()));

  const auto test_images =
      make_eval_images(corpus, proto, splits[split_index].test_ids, part_map);
  const EvalResult eval = evaluate(model, test_images);
  std::printf("accuracy: %s%% on %zu test sequences\n",
              format_percent(eval.accuracy_percent).c_str(), test_images.size());
  if (!s.out.empty()) {
    std::filesystem::create_directories(s.out);
    std::ofstream out(std::filesystem::path(s.out) / "confusion.txt");
    for (const auto& row : eval.confusion) {
      for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
      out << '\n';
    }
  }
  return 0;
}

int cmd_report(const Settings& s, const std::vector<std::string>& result_files) {
  std::vector<ExperimentResult> results;
  for (const auto& file : result_files)
    for (auto& r : read_results_json(file)) results.push_back(std::move(r));
  write_report(results, s.out, s.timing);
  std::printf("report written to %s\n", s.out.c_str());
  return 0;
}

void add_common_flags(CLI::App* cmd, Settings& s, bool with_model = true) {
  cmd->add_option("--dataset", s.dataset, "Dataset: msr3d or kard");
  cmd->add_option("--config", s.config_path, "JSON config file (flags override it)");
  cmd->add_option("--out", s.out, "Output directory");
  cmd->add_option("--input", s.input, "Input directory");
  auto seed = [&s](std::uint64_t v) { s.seed_flag = v; };
  cmd->add_option_function<std::uint64_t>("--seed", seed, "Training seed");
  if (with_model) {
    cmd->add_option("--depth", s.depth, "Model depth")
        ->check(CLI::IsMember({20, 32, 44, 56, 110}));
    cmd->add_option("--subset", s.subset, "AS1|AS2|AS3 or ActivitySet1..3");
    cmd->add_option("--experiment", s.experiment, "KARD experiment: A, B or C")
        ->check(CLI::IsMember({"A", "B", "C"}));
  }
  cmd->add_option("--partmap", s.partmap_path, "Part map file");
  cmd->add_option("--exclude", s.exclude_path, "Exclusion list file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skeleton action recognition: sequence encoding, residual-network training, "
               "and protocol evaluation"};
  app.require_subcommand(1);
  Settings s;

  auto* encode_cmd = app.add_subcommand("encode", "Encode a skeleton corpus into PNG images");
  add_common_flags(encode_cmd, s, false);

  auto* augment_cmd = app.add_subcommand("augment", "Expand encoded images into 32x32 variants");
  add_common_flags(augment_cmd, s, false);
  bool no_flips = false, no_color = false;
  augment_cmd->add_flag("--no-flips", no_flips, "Disable flip variants");
  augment_cmd->add_flag("--no-color", no_color, "Disable channel permutations");

  auto* train_cmd = app.add_subcommand("train", "Train one model on one protocol split");
  add_common_flags(train_cmd, s);
  int split_index = 0;
  train_cmd->add_option("--split-index", split_index, "Which split to train on");

  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint on a protocol split");
  add_common_flags(eval_cmd, s);
  std::string checkpoint;
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--split-index", split_index, "Which split to evaluate");

  auto* protocol_cmd =
      app.add_subcommand("protocol", "Run the full protocol sweep and write a report");
  add_common_flags(protocol_cmd, s);

  auto* report_cmd = app.add_subcommand("report", "Rebuild reports from results files");
  std::vector<std::string> result_files;
  report_cmd->add_option("--results", result_files, "results.json files")->required();
  report_cmd->add_option("--out", s.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // 1 = usage error
  }

  try {
    finish_settings(s);
    if (*encode_cmd) return cmd_encode(s);
    if (*augment_cmd) {
      if (no_flips) s.train.augment.flips_enabled = false;
      if (no_color) s.train.augment.color_enabled = false;
      return cmd_augment(s);
    }
    if (*train_cmd) return run_protocols(s, split_index);
    if (*eval_cmd) return cmd_evaluate(s, checkpoint, split_index);
    if (*protocol_cmd) return run_protocols(s, std::nullopt);
    if (*report_cmd) return cmd_report(s, result_files);
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
