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
#ifndef SKELACT_REPORT_HPP
#define SKELACT_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "skelact/protocol.hpp"

namespace skelact {
namespace baselines {

/// Published accuracies this tool's experiments are compared against.
/// Cells keep the exact text they were reported with; parse for arithmetic.
struct ReferenceRow {
  const char* method;
  std::vector<const char*> cells;
};

/// Reference residual-network results per MSR Action 3D subset, keyed by
/// depth: columns AS1, AS2, AS3, average.
const std::vector<std::pair<int, ReferenceRow>>& msr3d_resnet_reference();

/// Reference residual-network results on KARD: one row per (set, depth),
/// columns for Experiments A, B, C.
struct KardReferenceRow {
  int set;  // 1..3
  int depth;
  std::vector<const char*> cells;
};
const std::vector<KardReferenceRow>& kard_resnet_reference();

/// Cross-method comparison on MSR Action 3D (columns AS1, AS2, AS3, Aver.).
const std::vector<ReferenceRow>& msr3d_method_comparison();

/// Cross-method comparison on the whole KARD dataset (columns Exp. A/B/C).
const std::vector<ReferenceRow>& kard_method_comparison();

}  // namespace baselines

/// Full-precision machine-readable record of every experiment.
void write_results_json(const std::vector<ExperimentResult>& results,
                        const std::filesystem::path& path, bool include_timing = true);
std::vector<ExperimentResult> read_results_json(const std::filesystem::path& path);

/// Emits results.json, one confusion-matrix file per result, learning-curve
/// data files, and comparison.txt juxtaposing obtained accuracies with the
/// reference tables (delta column per matching row). Throws DataError on an
/// empty results list.
void write_report(const std::vector<ExperimentResult>& results,
                  const std::filesystem::path& out_dir, bool include_timing = true);

/// Half-up rounding to two decimals, as used in human-readable output.
std::string format_percent(double value);

}  // namespace skelact

#endif  // SKELACT_REPORT_HPP
