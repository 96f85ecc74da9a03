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
#include "skelact/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace skelact {

int PartMap::joint_count() const {
  int n = 0;
  for (const auto& part : parts) n += static_cast<int>(part.size());
  return n;
}

std::vector<int> PartMap::column_order() const {
  std::vector<int> order;
  order.reserve(joint_count());
  for (const auto& part : parts)
    for (int j : part) order.push_back(j);
  return order;
}

void PartMap::validate(int expected_joints) const {
  std::vector<int> seen(expected_joints, 0);
  for (const auto& part : parts) {
    for (int j : part) {
      if (j < 0 || j >= expected_joints)
        throw DataError("part map references joint " + std::to_string(j) + " outside 0.." +
                        std::to_string(expected_joints - 1));
      if (seen[j]++)
        throw DataError("part map lists joint " + std::to_string(j) + " twice");
    }
  }
  for (int j = 0; j < expected_joints; ++j)
    if (!seen[j]) throw DataError("part map misses joint " + std::to_string(j));
}

PartMap PartMap::defaults(DatasetId dataset) {
  PartMap map;
  if (dataset == DatasetId::Msr3d) {
    // 20-joint sensor skeleton: 0 hip center, 1 spine, 2 shoulder center,
    // 3 head, 4-7 left arm, 8-11 right arm, 12-15 left leg, 16-19 right leg.
    map.parts = {{{4, 5, 6, 7},      // left arm
                  {8, 9, 10, 11},    // right arm
                  {0, 1, 2, 3},      // trunk
                  {12, 13, 14, 15},  // left leg
                  {16, 17, 18, 19}}};
  } else {
    // 15-joint skeleton: 0 head, 1 neck, 2-4 left arm, 5-7 right arm,
    // 8 torso, 9-11 left leg, 12-14 right leg.
    map.parts = {{{2, 3, 4},     // left arm
                  {5, 6, 7},     // right arm
                  {0, 1, 8},     // trunk
                  {9, 10, 11},   // left leg
                  {12, 13, 14}}};
  }
  return map;
}

PartMap PartMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open part map: " + path.string());
  PartMap map;
  std::string line;
  int found = 0;
  while (std::getline(in, line)) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;
    if (line[begin] != 'P' && line[begin] != 'p')
      throw DataError("bad part map line: '" + line + "'");
    const std::size_t colon = line.find(':', begin);
    if (colon == std::string::npos) throw DataError("bad part map line: '" + line + "'");
    const int part = std::atoi(line.substr(begin + 1, colon - begin - 1).c_str());
    if (part < 1 || part > 5)
      throw DataError("part index must be P1..P5, got '" + line + "'");
    std::stringstream cells(line.substr(colon + 1));
    std::string cell;
    auto& list = map.parts[part - 1];
    list.clear();
    while (std::getline(cells, cell, ',')) {
      const auto first = cell.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      list.push_back(std::atoi(cell.c_str() + first));
    }
    ++found;
  }
  if (found != 5) throw DataError("part map must define all of P1..P5");
  return map;
}

void PartMap::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write part map: " + path.string());
  for (int p = 0; p < 5; ++p) {
    out << 'P' << (p + 1) << ": ";
    for (std::size_t i = 0; i < parts[p].size(); ++i) out << (i ? "," : "") << parts[p][i];
    out << '\n';
  }
}

NormalizationStats compute_stats(const SkeletonSequence& seq) {
  if (seq.frames.empty() || seq.frames[0].joints.empty())
    throw DataError("compute_stats: empty sequence");
  double min_c = seq.frames[0].joints[0].x;
  double max_c = min_c;
  for (const auto& frame : seq.frames) {
    for (const auto& joint : frame.joints) {
      for (double v : {joint.x, joint.y, joint.z}) {
        if (!std::isfinite(v)) throw DataError("compute_stats: non-finite coordinate");
        min_c = std::min(min_c, v);
        max_c = std::max(max_c, v);
      }
    }
  }
  return {min_c, max_c};
}

double normalize_coord(double v, const NormalizationStats& stats) {
  if (!(stats.max_c > stats.min_c)) return 0.0;  // constant sequence
  // The division comes first so the extrema land exactly on 0 and 255.
  return 255.0 * ((v - stats.min_c) / (stats.max_c - stats.min_c));
}

ImageF64 stack_frames(const SkeletonSequence& seq, const NormalizationStats& stats,
                      const PartMap& part_map) {
  const int frames = seq.frame_count();
  const int joints = seq.joint_count();
  if (frames < 1) throw DataError("stack_frames: empty sequence");
  part_map.validate(joints);
  const std::vector<int> order = part_map.column_order();

  ImageF64 img(frames, joints);
  for (int t = 0; t < frames; ++t) {
    const auto& frame = seq.frames[t];
    if (static_cast<int>(frame.joints.size()) != joints)
      throw DataError("stack_frames: ragged joint counts across frames");
    for (int c = 0; c < joints; ++c) {
      const Joint& j = frame.joints[order[c]];
      img.at(t, c, 0) = normalize_coord(j.x, stats);
      img.at(t, c, 1) = normalize_coord(j.y, stats);
      img.at(t, c, 2) = normalize_coord(j.z, stats);
    }
  }
  return img;
}

namespace {

double lerp(double u, double v, double f) { return u + (v - u) * f; }

double clamp_src(double s, int limit) {
  if (s < 0.0) return 0.0;
  const double hi = static_cast<double>(limit - 1);
  return s > hi ? hi : s;
}

}  // namespace

ImageF64 resize_bilinear(const ImageF64& img, int out_h, int out_w) {
  if (img.height < 1 || img.width < 1)
    throw DataError("resize_bilinear: empty input");
  const double scale_y = static_cast<double>(img.height) / static_cast<double>(out_h);
  const double scale_x = static_cast<double>(img.width) / static_cast<double>(out_w);

  ImageF64 out(out_h, out_w);
  for (int r = 0; r < out_h; ++r) {
    const double sy = clamp_src((r + 0.5) * scale_y - 0.5, img.height);
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fy = sy - y0;
    for (int c = 0; c < out_w; ++c) {
      const double sx = clamp_src((c + 0.5) * scale_x - 0.5, img.width);
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double fx = sx - x0;
      for (int ch = 0; ch < kImageChannels; ++ch) {
        const double top = lerp(img.at(y0, x0, ch), img.at(y0, x1, ch), fx);
        const double bot = lerp(img.at(y1, x0, ch), img.at(y1, x1, ch), fx);
        out.at(r, c, ch) = lerp(top, bot, fy);
      }
    }
  }
  return out;
}

ImageU8 quantize(const ImageF64& img) {
  ImageU8 out(img.height, img.width);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    double r = std::round(img.data[i]);  // halves away from zero
    if (r < 0.0) r = 0.0;
    if (r > 255.0) r = 255.0;
    out.data[i] = static_cast<std::uint8_t>(r);
  }
  return out;
}

ImageU8 encode(const SkeletonSequence& seq, const PartMap& part_map) {
  const NormalizationStats stats = compute_stats(seq);
  const ImageF64 stacked = stack_frames(seq, stats, part_map);
  return quantize(resize_bilinear(stacked, kEncodedSize, kEncodedSize));
}

}  // namespace skelact
