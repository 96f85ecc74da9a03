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
#ifndef SKELACT_IMAGE_IO_HPP
#define SKELACT_IMAGE_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "skelact/image.hpp"

namespace skelact {

/// Writes an 8-bit RGB PNG. Pixels are stored without compression (deflate
/// stored blocks), so the files stay lossless and readable by any viewer.
void write_png_rgb8(const ImageU8& img, const std::filesystem::path& path);

/// Reads PNGs produced by write_png_rgb8 (8-bit RGB, non-interlaced,
/// stored deflate blocks; all five row filters are understood).
ImageU8 read_png_rgb8(const std::filesystem::path& path);

/// One line per image: `image_path action subject episode split_role`
/// with an optional trailing `variant` column for augmented corpora.
struct ManifestEntry {
  std::string image_path;  // relative to the manifest's directory
  int action = 0;
  int subject = 0;
  int episode = 0;
  std::string split_role;  // "train" | "test" | "unassigned"
  std::string variant;     // empty for unaugmented images
};

void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace skelact

#endif  // SKELACT_IMAGE_IO_HPP
