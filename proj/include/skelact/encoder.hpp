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
#ifndef SKELACT_ENCODER_HPP
#define SKELACT_ENCODER_HPP

#include <array>
#include <filesystem>
#include <vector>

#include "skelact/dataset.hpp"
#include "skelact/image.hpp"

namespace skelact {

/// Encoded images are square with this side length.
inline constexpr int kEncodedSize = 40;

/// Extrema of the pooled coordinate multiset of one sequence.
struct NormalizationStats {
  double min_c = 0.0;
  double max_c = 0.0;
};

/// Assignment of joint indices to the five body parts, in the band order
/// they occupy in the encoded image: left arm, right arm, trunk, left leg,
/// right leg. The five lists must partition {0..K-1}.
struct PartMap {
  std::array<std::vector<int>, 5> parts;

  int joint_count() const;
  /// Column order of the stacked image: parts concatenated, each ascending.
  std::vector<int> column_order() const;
  /// Throws DataError unless the parts partition {0..expected_joints-1}.
  void validate(int expected_joints) const;

  static PartMap defaults(DatasetId dataset);
  /// Five lines "P1: i,j,k,..." .. "P5: ...".
  static PartMap load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

/// Min/max over all x, y and z values of every joint of every frame.
/// Throws DataError on a non-finite coordinate.
NormalizationStats compute_stats(const SkeletonSequence& seq);

/// 255 * (v - min) / (max - min); 0 when the stats are degenerate.
double normalize_coord(double v, const NormalizationStats& stats);

/// N x K x 3 image: row = frame, column = joint in part order, channels
/// carry the normalized x, y, z.
ImageF64 stack_frames(const SkeletonSequence& seq, const NormalizationStats& stats,
                      const PartMap& part_map);

/// Channel-independent bilinear interpolation with half-pixel centers.
ImageF64 resize_bilinear(const ImageF64& img, int out_h, int out_w);

/// Round half away from zero, clamp to [0, 255].
ImageU8 quantize(const ImageF64& img);

/// compute_stats -> stack_frames -> resize_bilinear(40, 40) -> quantize.
ImageU8 encode(const SkeletonSequence& seq, const PartMap& part_map);

}  // namespace skelact

#endif  // SKELACT_ENCODER_HPP
