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
#include "skelact/augment.hpp"

#include <stdexcept>

#include "skelact/encoder.hpp"

namespace skelact {
namespace {

void require_40(const ImageU8& img, const char* op) {
  if (img.height != kEncodedSize || img.width != kEncodedSize)
    throw std::invalid_argument(std::string(op) + ": expected a 40x40 image, got " +
                                std::to_string(img.height) + "x" + std::to_string(img.width));
}

ImageU8 crop_at(const ImageU8& img, int row0, int col0) {
  ImageU8 out(kCropSize, kCropSize);
  for (int r = 0; r < kCropSize; ++r)
    for (int c = 0; c < kCropSize; ++c)
      for (int ch = 0; ch < kImageChannels; ++ch)
        out.at(r, c, ch) = img.at(row0 + r, col0 + c, ch);
  return out;
}

ImageU8 apply_perm(const ImageU8& img, const std::array<int, 3>& perm) {
  ImageU8 out(img.height, img.width);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      for (int ch = 0; ch < kImageChannels; ++ch) out.at(r, c, ch) = img.at(r, c, perm[ch]);
  return out;
}

}  // namespace

int AugmentPolicy::variants_per_image() const {
  if (!crops_enabled) return 0;
  return 8 * (flips_enabled ? 3 : 1) * (color_enabled ? 6 : 1);
}

std::vector<ImageU8> crops8(const ImageU8& img) {
  require_40(img, "crops8");
  std::vector<ImageU8> crops;
  crops.reserve(kCropOffsets.size());
  for (const auto& [row0, col0] : kCropOffsets) crops.push_back(crop_at(img, row0, col0));
  return crops;
}

ImageU8 flip_h(const ImageU8& img) {
  ImageU8 out(img.height, img.width);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      for (int ch = 0; ch < kImageChannels; ++ch)
        out.at(r, c, ch) = img.at(r, img.width - 1 - c, ch);
  return out;
}

ImageU8 flip_v(const ImageU8& img) {
  ImageU8 out(img.height, img.width);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      for (int ch = 0; ch < kImageChannels; ++ch)
        out.at(r, c, ch) = img.at(img.height - 1 - r, c, ch);
  return out;
}

std::vector<ImageU8> color_variants(const ImageU8& img) {
  std::vector<ImageU8> variants;
  variants.reserve(kChannelPerms.size());
  for (const auto& perm : kChannelPerms) variants.push_back(apply_perm(img, perm));
  return variants;
}

std::vector<AugmentedImage> augment_all(const ImageU8& img, const AugmentPolicy& policy) {
  require_40(img, "augment_all");
  if (!policy.crops_enabled)
    throw std::invalid_argument("augment_all: cropping is mandatory (network input is 32x32)");

  std::vector<AugmentedImage> out;
  out.reserve(policy.variants_per_image());
  const std::vector<ImageU8> crops = crops8(img);
  for (std::size_t ci = 0; ci < crops.size(); ++ci) {
    const std::string crop_tag = "crop" + std::to_string(ci);
    std::vector<std::pair<ImageU8, std::string>> flipped;
    flipped.emplace_back(crops[ci], crop_tag);
    if (policy.flips_enabled) {
      flipped.emplace_back(flip_h(crops[ci]), crop_tag + ".flipH");
      flipped.emplace_back(flip_v(crops[ci]), crop_tag + ".flipV");
    }
    for (auto& [image, tag] : flipped) {
      if (policy.color_enabled) {
        for (std::size_t pi = 0; pi < kChannelPerms.size(); ++pi)
          out.push_back({apply_perm(image, kChannelPerms[pi]),
                         tag + ".perm" + std::to_string(pi)});
      } else {
        out.push_back({std::move(image), tag});
      }
    }
  }
  return out;
}

ImageU8 eval_view(const ImageU8& img) {
  require_40(img, "eval_view");
  return crop_at(img, 4, 4);
}

}  // namespace skelact
