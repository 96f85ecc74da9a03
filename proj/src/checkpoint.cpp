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
#include "skelact/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "skelact/common.hpp"

namespace skelact {
namespace {

constexpr char kMagic[8] = {'S', 'K', 'E', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

// Every persisted tensor in a fixed order: parameter values interleaved
// with the batch-norm running statistics they belong to.
std::vector<std::pair<std::string, nn::Tensor*>> tensor_list(ResNetModel& model) {
  std::vector<std::pair<std::string, nn::Tensor*>> list;
  auto add_bn = [&list](BatchNormState& bn, const std::string& prefix) {
    list.emplace_back(prefix + ".gamma", &bn.gamma.value);
    list.emplace_back(prefix + ".beta", &bn.beta.value);
    list.emplace_back(prefix + ".running_mean", &bn.running_mean);
    list.emplace_back(prefix + ".running_var", &bn.running_var);
  };
  list.emplace_back("stem.weight", &model.stem.value);
  add_bn(model.stem_bn, "stem.bn");
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    const std::string prefix = "block" + std::to_string(i);
    list.emplace_back(prefix + ".conv1.weight", &model.blocks[i].conv1.value);
    add_bn(model.blocks[i].bn1, prefix + ".bn1");
    list.emplace_back(prefix + ".conv2.weight", &model.blocks[i].conv2.value);
    add_bn(model.blocks[i].bn2, prefix + ".bn2");
  }
  list.emplace_back("fc.weight", &model.fc_weight.value);
  list.emplace_back("fc.bias", &model.fc_bias.value);
  return list;
}

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_i32(std::ofstream& out, std::int32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint32_t read_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::int32_t read_i32(std::ifstream& in) {
  std::int32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void save_checkpoint(const ResNetModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open checkpoint for writing: " + path.string());

  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kVersion);
  write_i32(out, model.config.depth);
  write_i32(out, model.config.num_classes);
  for (int w : model.config.stage_widths) write_i32(out, w);

  auto tensors = tensor_list(const_cast<ResNetModel&>(model));
  write_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, tensor] : tensors) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<std::uint32_t>(tensor->shape.size()));
    for (int d : tensor->shape) write_i32(out, d);
    out.write(reinterpret_cast<const char*>(tensor->data.data()),
              static_cast<std::streamsize>(tensor->data.size() * sizeof(double)));
  }
  if (!out) throw DataError("checkpoint write failed: " + path.string());
}

ResNetModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path.string());

  char magic[8] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw DataError("not a checkpoint file: " + path.string());
  if (read_u32(in) != kVersion) throw DataError("unsupported checkpoint version: " + path.string());

  ResNetConfig config;
  config.depth = read_i32(in);
  config.num_classes = read_i32(in);
  for (int& w : config.stage_widths) w = read_i32(in);
  ResNetModel model = build_resnet(config);

  auto tensors = tensor_list(model);
  const std::uint32_t count = read_u32(in);
  if (count != tensors.size())
    throw DataError("checkpoint tensor count mismatch in " + path.string());
  for (auto& [name, tensor] : tensors) {
    const std::uint32_t name_len = read_u32(in);
    std::string stored(name_len, '\0');
    in.read(stored.data(), name_len);
    if (stored != name)
      throw DataError("checkpoint tensor order mismatch: expected '" + name + "', found '" +
                      stored + "' in " + path.string());
    const std::uint32_t ndim = read_u32(in);
    std::vector<int> dims(ndim);
    for (auto& d : dims) d = read_i32(in);
    if (dims != tensor->shape)
      throw DataError("checkpoint shape mismatch for '" + name + "' in " + path.string());
    in.read(reinterpret_cast<char*>(tensor->data.data()),
            static_cast<std::streamsize>(tensor->data.size() * sizeof(double)));
    if (!in) throw DataError("truncated checkpoint: " + path.string());
  }
  return model;
}

}  // namespace skelact
