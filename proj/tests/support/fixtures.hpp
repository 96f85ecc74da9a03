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
#ifndef SKELACT_TESTS_FIXTURES_HPP
#define SKELACT_TESTS_FIXTURES_HPP

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "skelact/dataset.hpp"
#include "skelact/image.hpp"

namespace skelact::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

/// Random sequence with coordinates in [-2, 3].
inline SkeletonSequence random_sequence(std::mt19937_64& rng, int frames, int joints,
                                        DatasetId dataset = DatasetId::Msr3d, int action = 1,
                                        int subject = 1, int episode = 1) {
  SkeletonSequence seq;
  seq.dataset = dataset;
  seq.action_id = action;
  seq.subject_id = subject;
  seq.episode_id = episode;
  seq.frames.resize(frames);
  for (auto& frame : seq.frames) {
    frame.joints.resize(joints);
    for (auto& j : frame.joints) {
      j.x = uniform(rng, -2.0, 3.0);
      j.y = uniform(rng, -2.0, 3.0);
      j.z = uniform(rng, -2.0, 3.0);
    }
  }
  return seq;
}

inline ImageU8 random_image(std::mt19937_64& rng, int h, int w) {
  ImageU8 img(h, w);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(rng() % 256);
  return img;
}

/// Fresh scratch directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("skelact_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Writes one corpus file in the raw on-disk layout.
inline void write_corpus_file(const std::filesystem::path& dir, DatasetId dataset,
                              const SkeletonSequence& seq, bool all_zero_frame = false) {
  const CorpusFormat fmt = CorpusFormat::defaults(dataset);
  const std::string name = seq.key().to_string() + fmt.filename_suffix;
  std::ofstream out(dir / name);
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    for (const auto& j : seq.frames[f].joints) {
      const bool zero = all_zero_frame && f == 0;
      out << (zero ? 0.0 : j.x) << ' ' << (zero ? 0.0 : j.y) << ' ' << (zero ? 0.0 : j.z);
      if (fmt.values_per_row >= 4) out << ' ' << 1.0;
      out << '\n';
    }
  }
}

}  // namespace skelact::testing

#endif  // SKELACT_TESTS_FIXTURES_HPP
