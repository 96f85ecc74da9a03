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
#include "skelact/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace skelact {

std::string dataset_name(DatasetId id) { return id == DatasetId::Msr3d ? "MSR3D" : "KARD"; }

DatasetId dataset_from_name(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "msr3d" || lower == "msr-action3d" || lower == "msraction3d")
    return DatasetId::Msr3d;
  if (lower == "kard") return DatasetId::Kard;
  throw DataError("unknown dataset '" + name + "' (expected msr3d or kard)");
}

std::string SequenceKey::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "a%02d_s%02d_e%02d", action, subject, episode);
  return buf;
}

SequenceKey SequenceKey::parse(const std::string& text) {
  int a = 0, s = 0, e = 0;
  if (std::sscanf(text.c_str(), "a%d_s%d_e%d", &a, &s, &e) != 3)
    throw DataError("cannot parse sequence id '" + text + "' (expected aAA_sSS_eEE)");
  return {a, s, e};
}

CorpusFormat CorpusFormat::defaults(DatasetId id) {
  if (id == DatasetId::Msr3d) return {20, 4, "_skeleton3D.txt"};
  return {15, 3, "_realworld.txt"};
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

bool parse_filename_key(const std::string& filename, const std::string& suffix, SequenceKey* key) {
  if (filename.size() <= suffix.size() ||
      filename.compare(filename.size() - suffix.size(), suffix.size(), suffix) != 0)
    return false;
  const std::string stem = filename.substr(0, filename.size() - suffix.size());
  int a = 0, s = 0, e = 0;
  int consumed = 0;
  if (std::sscanf(stem.c_str(), "a%d_s%d_e%d%n", &a, &s, &e, &consumed) != 3 ||
      consumed != static_cast<int>(stem.size()))
    return false;
  *key = {a, s, e};
  return true;
}

// All whitespace-separated numeric tokens of one line.
bool parse_row(const std::string& line, std::vector<double>* out) {
  out->clear();
  const char* p = line.c_str();
  while (*p) {
    while (*p && std::isspace(static_cast<unsigned char>(*p))) ++p;
    if (!*p) break;
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) return false;
    out->push_back(v);
    p = end;
  }
  return true;
}

SkeletonSequence parse_skeleton_file(const std::filesystem::path& path, DatasetId dataset,
                                     const SequenceKey& key, const CorpusFormat& fmt) {
  std::ifstream in(path);
  if (!in) throw DataError("unreadable file");

  std::vector<std::vector<double>> rows;
  std::string line;
  std::vector<double> values;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (!parse_row(line, &values))
      throw DataError("malformed numeric row at line " + std::to_string(line_no));
    if (static_cast<int>(values.size()) != fmt.values_per_row)
      throw DataError("line " + std::to_string(line_no) + " has " +
                      std::to_string(values.size()) + " values, expected " +
                      std::to_string(fmt.values_per_row));
    for (double v : values)
      if (!std::isfinite(v))
        throw DataError("non-finite coordinate at line " + std::to_string(line_no));
    rows.push_back(values);
  }
  if (rows.empty()) throw DataError("empty skeleton file");
  if (rows.size() % static_cast<std::size_t>(fmt.joint_count) != 0)
    throw DataError(std::to_string(rows.size()) + " rows is not a multiple of " +
                    std::to_string(fmt.joint_count) + " joints");

  SkeletonSequence seq;
  seq.dataset = dataset;
  seq.action_id = key.action;
  seq.subject_id = key.subject;
  seq.episode_id = key.episode;
  const std::size_t frames = rows.size() / static_cast<std::size_t>(fmt.joint_count);
  seq.frames.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    auto& joints = seq.frames[f].joints;
    joints.resize(fmt.joint_count);
    for (int j = 0; j < fmt.joint_count; ++j) {
      const auto& row = rows[f * fmt.joint_count + j];
      joints[j].x = row[0];
      joints[j].y = row[1];
      joints[j].z = row[2];
      if (fmt.values_per_row >= 4) joints[j].confidence = row[3];
    }
  }
  return seq;
}

}  // namespace

bool validity_filter(const SkeletonSequence& seq, int expected_joints) {
  if (seq.frames.empty()) return false;
  for (const auto& frame : seq.frames) {
    if (static_cast<int>(frame.joints.size()) != expected_joints) return false;
    bool all_zero = true;
    for (const auto& j : frame.joints) {
      if (j.x != 0.0 || j.y != 0.0 || j.z != 0.0) {
        all_zero = false;
        break;
      }
    }
    if (all_zero) return false;  // missing skeleton
  }
  return true;
}

Corpus parse_corpus(const std::filesystem::path& root, DatasetId dataset,
                    const ParseOptions& options) {
  if (!std::filesystem::is_directory(root))
    throw DataError("corpus directory does not exist: " + root.string());
  const CorpusFormat fmt = options.format.value_or(CorpusFormat::defaults(dataset));

  std::vector<std::pair<SequenceKey, std::filesystem::path>> files;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    SequenceKey key;
    if (parse_filename_key(entry.path().filename().string(), fmt.filename_suffix, &key))
      files.emplace_back(key, entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  Corpus corpus;
  corpus.dataset = dataset;
  corpus.report.files_seen = static_cast<int>(files.size());
  for (const auto& [key, path] : files) {
    if (options.exclusions.count(key)) {
      corpus.report.excluded.push_back(key);
      continue;
    }
    try {
      SkeletonSequence seq = parse_skeleton_file(path, dataset, key, fmt);
      if (!validity_filter(seq, fmt.joint_count)) {
        corpus.report.filtered_invalid.push_back(key);
        continue;
      }
      if (!corpus.sequences.empty() && corpus.sequences.back().key() == key) {
        corpus.report.rejected.emplace_back(path.string(), "duplicate sequence id");
        continue;
      }
      corpus.sequences.push_back(std::move(seq));
    } catch (const DataError& err) {
      corpus.report.rejected.emplace_back(path.string(), err.what());
    }
  }
  if (corpus.sequences.empty())
    throw DataError("no sequences found under " + root.string() + " (" +
                    std::to_string(files.size()) + " candidate files)");
  return corpus;
}

// ---------------------------------------------------------------------------
// Action tables
// ---------------------------------------------------------------------------

const std::array<const char*, 20>& msr3d_action_names() {
  static const std::array<const char*, 20> names = {
      "High arm wave", "Horizontal arm wave", "Hammer",       "Hand catch",   "Forward punch",
      "High throw",    "Draw x",              "Draw tick",    "Draw circle",  "Hand clap",
      "Two hand wave", "Side-boxing",         "Bend",         "Forward kick", "Side kick",
      "Jogging",       "Tennis swing",        "Tennis serve", "Golf swing",   "Pickup & Throw"};
  return names;
}

const std::array<const char*, 18>& kard_action_names() {
  static const std::array<const char*, 18> names = {
      "Horizontal arm wave", "High arm wave", "Two hand wave", "Catch cap",  "High throw",
      "Draw X",              "Draw tick",     "Toss paper",    "Forward kick", "Side kick",
      "Take umbrella",       "Bend",          "Hand clap",     "Walk",       "Phone call",
      "Drink",               "Sit down",      "Stand up"};
  return names;
}

const std::array<const char*, 8>& msr3d_subset_actions(Msr3dSubset subset) {
  static const std::array<std::array<const char*, 8>, 3> table = {{
      {"Horizontal arm wave", "Hammer", "Forward punch", "High throw", "Hand clap", "Bend",
       "Tennis serve", "Pickup & Throw"},
      {"High arm wave", "Hand catch", "Draw x", "Draw tick", "Draw circle", "Two hand wave",
       "Forward kick", "Side-boxing"},
      {"High throw", "Forward kick", "Side kick", "Jogging", "Tennis swing", "Tennis serve",
       "Golf swing", "Pickup & Throw"},
  }};
  return table[static_cast<int>(subset)];
}

const std::array<int, 8>& msr3d_subset_action_ids(Msr3dSubset subset) {
  static const std::array<std::array<int, 8>, 3> table = {{
      {2, 3, 5, 6, 10, 13, 18, 20},
      {1, 4, 7, 8, 9, 11, 14, 12},
      {6, 14, 15, 16, 17, 18, 19, 20},
  }};
  return table[static_cast<int>(subset)];
}

const std::array<const char*, 8>& kard_set_actions(KardActivitySet set) {
  static const std::array<std::array<const char*, 8>, 3> table = {{
      {"Horizontal arm wave", "Two-hand wave", "Bend", "Phone call", "Stand up", "Forward kick",
       "Draw X", "Walk"},
      {"High arm wave", "Side kick", "Catch cap", "Draw tick", "Hand clap", "Forward kick",
       "Bend", "Sit down"},
      {"Draw tick", "Drink", "Sit down", "Phone call", "Take umbrella", "Toss paper",
       "High throw", "Horiz. arm wave"},
  }};
  return table[static_cast<int>(set)];
}

const std::array<int, 8>& kard_set_action_ids(KardActivitySet set) {
  static const std::array<std::array<int, 8>, 3> table = {{
      {1, 3, 12, 15, 18, 9, 6, 14},
      {2, 10, 4, 7, 13, 9, 12, 17},
      {7, 16, 17, 15, 11, 8, 5, 1},
  }};
  return table[static_cast<int>(set)];
}

double kard_experiment_train_fraction(KardExperiment exp) {
  switch (exp) {
    case KardExperiment::A: return 1.0 / 3.0;
    case KardExperiment::B: return 2.0 / 3.0;
    case KardExperiment::C: return 1.0 / 2.0;
  }
  throw std::invalid_argument("bad experiment");
}

// ---------------------------------------------------------------------------
// Protocols
// ---------------------------------------------------------------------------

ProtocolSpec ProtocolSpec::msr3d_cross_subject(Msr3dSubset subset,
                                               std::vector<int> train_subjects) {
  if (train_subjects.empty())
    throw DataError("cross-subject protocol needs at least one training subject");
  ProtocolSpec proto;
  proto.dataset = DatasetId::Msr3d;
  proto.subset_name = "AS" + std::to_string(static_cast<int>(subset) + 1);
  const auto& ids = msr3d_subset_action_ids(subset);
  const auto& names = msr3d_subset_actions(subset);
  proto.action_ids.assign(ids.begin(), ids.end());
  proto.action_names.assign(names.begin(), names.end());
  proto.rule.kind = SplitRule::Kind::CrossSubject;
  proto.rule.train_subjects = std::move(train_subjects);
  return proto;
}

ProtocolSpec ProtocolSpec::kard(KardActivitySet set, KardExperiment exp, int repeats,
                                std::uint64_t seed) {
  if (repeats < 1) throw DataError("kard protocol needs at least one repeat");
  ProtocolSpec proto;
  proto.dataset = DatasetId::Kard;
  proto.subset_name = "ActivitySet" + std::to_string(static_cast<int>(set) + 1);
  const auto& ids = kard_set_action_ids(set);
  const auto& names = kard_set_actions(set);
  proto.action_ids.assign(ids.begin(), ids.end());
  proto.action_names.assign(names.begin(), names.end());
  proto.experiment = exp;
  proto.rule.kind = SplitRule::Kind::FractionalRandom;
  proto.rule.train_fraction = kard_experiment_train_fraction(exp);
  proto.rule.repeats = repeats;
  proto.rule.seed = seed;
  return proto;
}

int ProtocolSpec::class_index(int action_id) const {
  for (std::size_t i = 0; i < action_ids.size(); ++i)
    if (action_ids[i] == action_id) return static_cast<int>(i);
  return -1;
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

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

// Fisher-Yates with explicit draws; std::shuffle's sequence is not pinned
// by the standard.
void shuffle_keys(std::vector<SequenceKey>& keys, std::mt19937_64& rng) {
  for (std::size_t i = keys.size(); i > 1; --i)
    std::swap(keys[i - 1], keys[uniform_below(rng, i)]);
}

}  // namespace

std::vector<Split> make_split(const Corpus& corpus, const ProtocolSpec& proto) {
  if (corpus.sequences.empty()) throw DataError("make_split: empty corpus");
  if (corpus.dataset != proto.dataset)
    throw DataError("make_split: protocol targets " + dataset_name(proto.dataset) +
                    " but corpus holds " + dataset_name(corpus.dataset));

  // Subset sequences grouped per class, kept in deterministic (sorted) order.
  std::map<int, std::vector<SequenceKey>> by_action;
  for (const auto& seq : corpus.sequences)
    if (proto.class_index(seq.action_id) >= 0) by_action[seq.action_id].push_back(seq.key());
  for (int action : proto.action_ids)
    if (!by_action.count(action))
      throw DataError("subset action " + std::to_string(action) + " ('" +
                      proto.action_names[proto.class_index(action)] +
                      "') is absent from the corpus");

  std::vector<Split> splits;
  if (proto.rule.kind == SplitRule::Kind::CrossSubject) {
    Split split;
    const auto& train_subjects = proto.rule.train_subjects;
    for (const auto& [action, keys] : by_action) {
      for (const auto& key : keys) {
        const bool in_train = std::find(train_subjects.begin(), train_subjects.end(),
                                        key.subject) != train_subjects.end();
        (in_train ? split.train_ids : split.test_ids).push_back(key);
      }
    }
    if (split.train_ids.empty()) throw DataError("cross-subject split has an empty train side");
    if (split.test_ids.empty()) throw DataError("cross-subject split has an empty test side");
    std::sort(split.train_ids.begin(), split.train_ids.end());
    std::sort(split.test_ids.begin(), split.test_ids.end());
    splits.push_back(std::move(split));
    return splits;
  }

  const double fraction = proto.rule.train_fraction;
  if (!(fraction > 0.0) || !(fraction < 1.0))
    throw DataError("train_fraction must lie strictly between 0 and 1, got " +
                    std::to_string(fraction));
  for (int repeat = 0; repeat < proto.rule.repeats; ++repeat) {
    std::seed_seq seq{static_cast<std::uint32_t>(proto.rule.seed),
                      static_cast<std::uint32_t>(proto.rule.seed >> 32),
                      static_cast<std::uint32_t>(repeat)};
    std::mt19937_64 rng(seq);
    Split split;
    for (int action : proto.action_ids) {
      std::vector<SequenceKey> keys = by_action.at(action);
      const std::size_t n = keys.size();
      if (n < 2)
        throw DataError("class " + std::to_string(action) +
                        " has fewer than 2 sequences; cannot split");
      std::size_t train_count = static_cast<std::size_t>(
          std::llround(static_cast<double>(n) * fraction));
      train_count = std::clamp<std::size_t>(train_count, 1, n - 1);
      shuffle_keys(keys, rng);
      split.train_ids.insert(split.train_ids.end(), keys.begin(), keys.begin() + train_count);
      split.test_ids.insert(split.test_ids.end(), keys.begin() + train_count, keys.end());
    }
    std::sort(split.train_ids.begin(), split.train_ids.end());
    std::sort(split.test_ids.begin(), split.test_ids.end());
    splits.push_back(std::move(split));
  }
  return splits;
}

// ---------------------------------------------------------------------------
// Canonical interchange format
// ---------------------------------------------------------------------------

void write_canonical_sequence(const SkeletonSequence& seq, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << dataset_name(seq.dataset) << ' ' << seq.action_id << ' ' << seq.subject_id << ' '
      << seq.episode_id << ' ' << seq.frame_count() << ' ' << seq.joint_count() << '\n';
  char buf[96];
  for (const auto& frame : seq.frames) {
    for (const auto& j : frame.joints) {
      // %.17g keeps enough digits that strtod restores the exact double.
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", j.x, j.y, j.z);
      out << buf;
    }
  }
  if (!out) throw DataError("write failed: " + path.string());
}

SkeletonSequence read_canonical_sequence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  std::string dataset_token;
  int action = 0, subject = 0, episode = 0, frames = 0, joints = 0;
  if (!(in >> dataset_token >> action >> subject >> episode >> frames >> joints))
    throw DataError("bad canonical header in " + path.string());
  if (frames < 1 || joints < 1)
    throw DataError("bad canonical dimensions in " + path.string());
  SkeletonSequence seq;
  seq.dataset = dataset_from_name(dataset_token);
  seq.action_id = action;
  seq.subject_id = subject;
  seq.episode_id = episode;
  seq.frames.resize(frames);
  for (int f = 0; f < frames; ++f) {
    seq.frames[f].joints.resize(joints);
    for (int j = 0; j < joints; ++j) {
      auto& joint = seq.frames[f].joints[j];
      if (!(in >> joint.x >> joint.y >> joint.z))
        throw DataError("truncated canonical body in " + path.string());
    }
  }
  return seq;
}

std::set<SequenceKey> read_exclusion_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open exclusion list: " + path.string());
  std::set<SequenceKey> keys;
  std::string line;
  while (std::getline(in, line)) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;
    const auto end = line.find_last_not_of(" \t\r");
    keys.insert(SequenceKey::parse(line.substr(begin, end - begin + 1)));
  }
  return keys;
}

}  // namespace skelact
