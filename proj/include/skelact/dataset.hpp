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
#ifndef SKELACT_DATASET_HPP
#define SKELACT_DATASET_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "skelact/common.hpp"

namespace skelact {

enum class DatasetId { Msr3d, Kard };

std::string dataset_name(DatasetId id);
DatasetId dataset_from_name(const std::string& name);

struct Joint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::optional<double> confidence;
};

struct SkeletonFrame {
  std::vector<Joint> joints;
};

/// (action, subject, episode) — unique within one dataset's corpus.
struct SequenceKey {
  int action = 0;
  int subject = 0;
  int episode = 0;

  auto operator<=>(const SequenceKey&) const = default;
  std::string to_string() const;  // "a01_s02_e03"
  static SequenceKey parse(const std::string& text);
};

struct SkeletonSequence {
  DatasetId dataset = DatasetId::Msr3d;
  int action_id = 0;
  int subject_id = 0;
  int episode_id = 0;
  std::vector<SkeletonFrame> frames;

  SequenceKey key() const { return {action_id, subject_id, episode_id}; }
  int frame_count() const { return static_cast<int>(frames.size()); }
  int joint_count() const { return frames.empty() ? 0 : static_cast<int>(frames.front().joints.size()); }
};

/// On-disk layout of one corpus. Defaults follow the released datasets but
/// every field can be overridden.
struct CorpusFormat {
  int joint_count = 20;
  int values_per_row = 4;           // x y z [confidence]
  std::string filename_suffix = "_skeleton3D.txt";

  static CorpusFormat defaults(DatasetId id);
};

struct ParseReport {
  int files_seen = 0;
  std::vector<std::pair<std::string, std::string>> rejected;  // (path, reason)
  std::vector<SequenceKey> filtered_invalid;                  // failed validity_filter
  std::vector<SequenceKey> excluded;                          // on the exclusion list
};

struct Corpus {
  DatasetId dataset = DatasetId::Msr3d;
  std::vector<SkeletonSequence> sequences;  // sorted by key
  ParseReport report;
};

struct ParseOptions {
  std::optional<CorpusFormat> format;          // default: CorpusFormat::defaults(dataset)
  std::set<SequenceKey> exclusions;            // dropped after parsing, reported
};

/// Scans `root` for files matching the dataset's filename pattern, parses
/// them, drops sequences rejected by validity_filter or the exclusion list,
/// and returns the rest sorted by key. Throws DataError when nothing parses.
Corpus parse_corpus(const std::filesystem::path& root, DatasetId dataset,
                    const ParseOptions& options = {});

/// False when the sequence has a frame with every joint at the origin, or a
/// joint count different from `expected_joints`.
bool validity_filter(const SkeletonSequence& seq, int expected_joints);

// ---------------------------------------------------------------------------
// Protocols and splits
// ---------------------------------------------------------------------------

enum class Msr3dSubset { AS1, AS2, AS3 };
enum class KardActivitySet { Set1, Set2, Set3 };
enum class KardExperiment { A, B, C };

/// Action names of MSR Action 3D, indexed by action id 1..20.
const std::array<const char*, 20>& msr3d_action_names();
/// Action names of KARD, indexed by action id 1..18.
const std::array<const char*, 18>& kard_action_names();

/// The three 8-action subsets of MSR Action 3D (AS1, AS2, AS3).
const std::array<const char*, 8>& msr3d_subset_actions(Msr3dSubset subset);
const std::array<int, 8>& msr3d_subset_action_ids(Msr3dSubset subset);

/// The three 8-action activity sets of KARD.
const std::array<const char*, 8>& kard_set_actions(KardActivitySet set);
const std::array<int, 8>& kard_set_action_ids(KardActivitySet set);

double kard_experiment_train_fraction(KardExperiment exp);  // A:1/3 B:2/3 C:1/2

struct SplitRule {
  enum class Kind { CrossSubject, FractionalRandom };
  Kind kind = Kind::CrossSubject;
  std::vector<int> train_subjects = {1, 3, 5, 7, 9};  // CrossSubject only
  double train_fraction = 0.0;                        // FractionalRandom only
  int repeats = 1;
  std::uint64_t seed = 0;
};

struct ProtocolSpec {
  DatasetId dataset = DatasetId::Msr3d;
  std::string subset_name;                // "AS1" / "ActivitySet2" / ...
  std::vector<int> action_ids;            // the subset's 8 actions, table order
  std::vector<std::string> action_names;  // same order
  std::optional<KardExperiment> experiment;
  SplitRule rule;

  static ProtocolSpec msr3d_cross_subject(Msr3dSubset subset,
                                          std::vector<int> train_subjects = {1, 3, 5, 7, 9});
  static ProtocolSpec kard(KardActivitySet set, KardExperiment exp, int repeats = 10,
                           std::uint64_t seed = 7);

  int num_classes() const { return static_cast<int>(action_ids.size()); }
  /// Position of `action_id` in the subset's table order, or -1.
  int class_index(int action_id) const;
};

struct Split {
  std::vector<SequenceKey> train_ids;  // sorted
  std::vector<SequenceKey> test_ids;   // sorted
};

/// CrossSubject -> one split; FractionalRandom -> `repeats` class-stratified
/// splits, reproducible from (seed, repeat index). Throws DataError when a
/// subset action is missing from the corpus or a class is too small to split.
std::vector<Split> make_split(const Corpus& corpus, const ProtocolSpec& proto);

// ---------------------------------------------------------------------------
// Canonical interchange format
// ---------------------------------------------------------------------------

/// One sequence per file: header "dataset action subject episode N K", then
/// N*K rows of "x y z" printed so that reading back is bit-exact.
void write_canonical_sequence(const SkeletonSequence& seq, const std::filesystem::path& path);
SkeletonSequence read_canonical_sequence(const std::filesystem::path& path);

/// Plain-text list of sequence ids ("a01_s02_e03"), one per line; blank
/// lines and lines starting with '#' are skipped.
std::set<SequenceKey> read_exclusion_list(const std::filesystem::path& path);

}  // namespace skelact

#endif  // SKELACT_DATASET_HPP
