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
#ifndef SKELACT_CHECKPOINT_HPP
#define SKELACT_CHECKPOINT_HPP

#include <filesystem>

#include "skelact/resnet.hpp"

namespace skelact {

/// Binary checkpoint: versioned header with the architecture descriptor
/// (depth, num_classes, stage widths), then an ordered list of named
/// tensors — every parameter value plus the batch-norm running statistics —
/// as raw little-endian 64-bit values. Round-trips bit-exactly.
void save_checkpoint(const ResNetModel& model, const std::filesystem::path& path);

/// Rebuilds the architecture from the header and restores every tensor.
/// Throws DataError on format or architecture mismatch.
ResNetModel load_checkpoint(const std::filesystem::path& path);

}  // namespace skelact

#endif  // SKELACT_CHECKPOINT_HPP
