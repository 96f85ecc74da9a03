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
#ifndef SKELACT_IMAGE_HPP
#define SKELACT_IMAGE_HPP

#include <cstdint>
#include <vector>

namespace skelact {

inline constexpr int kImageChannels = 3;

/// Row-major, channel-interleaved 3-channel image of 8-bit values.
struct ImageU8 {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;  // size = height * width * 3

  ImageU8() = default;
  ImageU8(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w * kImageChannels, 0) {}

  std::uint8_t& at(int row, int col, int ch) {
    return data[(static_cast<std::size_t>(row) * width + col) * kImageChannels + ch];
  }
  std::uint8_t at(int row, int col, int ch) const {
    return data[(static_cast<std::size_t>(row) * width + col) * kImageChannels + ch];
  }

  bool operator==(const ImageU8&) const = default;
};

/// Same layout with real-valued entries; the pre-quantization working type.
struct ImageF64 {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  ImageF64() = default;
  ImageF64(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w * kImageChannels, 0.0) {}

  double& at(int row, int col, int ch) {
    return data[(static_cast<std::size_t>(row) * width + col) * kImageChannels + ch];
  }
  double at(int row, int col, int ch) const {
    return data[(static_cast<std::size_t>(row) * width + col) * kImageChannels + ch];
  }
};

}  // namespace skelact

#endif  // SKELACT_IMAGE_HPP
