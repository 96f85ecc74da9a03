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
#ifndef SKELACT_COMMON_HPP
#define SKELACT_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace skelact {

/// Problems with input data: unreadable corpora, malformed files,
/// inconsistent protocol requests. Mapped to exit code 2 by the CLI.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or gradient. Exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace skelact

#endif  // SKELACT_COMMON_HPP
