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
#ifndef SKELACT_AUGMENT_HPP
#define SKELACT_AUGMENT_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "skelact/image.hpp"

namespace skelact {

/// Network input side length; every training/evaluation view is this size.
inline constexpr int kCropSize = 32;

/// The eight 32x32 window offsets inside a 40x40 image: the 3x3 grid over
/// {0,4,8} minus its center, row-major.
inline constexpr std::array<std::pair<int, int>, 8> kCropOffsets = {{
    {0, 0}, {0, 4}, {0, 8}, {4, 0}, {4, 8}, {8, 0}, {8, 4}, {8, 8},
}};

/// The six channel orderings, identity first, lexicographic. Variant k maps
/// output channel j to input channel kChannelPerms[k][j].
inline constexpr std::array<std::array<int, 3>, 6> kChannelPerms = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

struct AugmentPolicy {
  bool crops_enabled = true;
  bool flips_enabled = true;
  bool color_enabled = true;

  /// Variants produced per image: 8 * (3 if flips) * (6 if color).
  int variants_per_image() const;
};

/// The eight 32x32 crops of a 40x40 image, in kCropOffsets order.
std::vector<ImageU8> crops8(const ImageU8& img);

ImageU8 flip_h(const ImageU8& img);  // reverses columns
ImageU8 flip_v(const ImageU8& img);  // reverses rows

/// The six channel permutations of `img`, in kChannelPerms order.
std::vector<ImageU8> color_variants(const ImageU8& img);

struct AugmentedImage {
  ImageU8 image;
  std::string variant;  // e.g. "crop3.flipH.perm4"
};

/// Deterministic expansion of one 40x40 image into 32x32 training variants:
/// for each crop, {original, flip_h, flip_v}, each under the channel
/// permutations. Disabled flags collapse their factor; cropping is
/// mandatory. Throws std::invalid_argument on a wrong-size input or a
/// policy with crops disabled.
std::vector<AugmentedImage> augment_all(const ImageU8& img, const AugmentPolicy& policy);

/// The single evaluation view: center crop at offset (4, 4).
ImageU8 eval_view(const ImageU8& img);

}  // namespace skelact

#endif  // SKELACT_AUGMENT_HPP
