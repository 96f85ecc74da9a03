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
#include "skelact/report.hpp"

#include <fstream>
#include <sstream>

#include <doctest.h>

#include "fixtures.hpp"

using namespace skelact;
using testing::TempDir;

namespace {

ExperimentResult sample_result() {
  ExperimentResult r;
  r.dataset = "MSR3D";
  r.subset = "AS1";
  r.depth = 20;
  r.seed = 5;
  r.class_names = {"Horizontal arm wave", "Hammer"};
  r.per_split_accuracy = {93.75};
  r.mean_accuracy = 93.75;
  r.confusion = {{15, 1}, {0, 16}};
  r.curves = {{40.0, 50.0}, {10.0, 20.0}};
  r.checkpoint_paths = {"MSR3D_AS1_d20_split0.ckpt"};
  r.wall_seconds = 12.5;
  return r;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool line_with_tokens(const std::string& text, const std::vector<std::string>& tokens) {
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::size_t pos = 0;
    bool ok = true;
    for (const auto& token : tokens) {
      pos = line.find(token, pos);
      if (pos == std::string::npos) {
        ok = false;
        break;
      }
      pos += token.size();
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("format_percent rounds half up to two decimals") {
  CHECK(format_percent(99.4) == "99.40");
  CHECK(format_percent(100.0) == "100.00");
  CHECK(format_percent(0.125) == "0.13");
  CHECK(format_percent(0.375) == "0.38");
  CHECK(format_percent(75.0) == "75.00");
}

TEST_CASE("results json round trip") {
  TempDir dir("results");
  const auto path = dir.path() / "results.json";
  const ExperimentResult original = sample_result();
  write_results_json({original}, path);
  const auto back = read_results_json(path);
  REQUIRE(back.size() == 1);
  const ExperimentResult& r = back[0];
  CHECK(r.dataset == original.dataset);
  CHECK(r.subset == original.subset);
  CHECK(r.experiment == original.experiment);
  CHECK(r.depth == original.depth);
  CHECK(r.seed == original.seed);
  CHECK(r.class_names == original.class_names);
  CHECK(r.per_split_accuracy == original.per_split_accuracy);
  CHECK(r.mean_accuracy == original.mean_accuracy);
  CHECK(r.confusion == original.confusion);
  CHECK(r.curves == original.curves);
  CHECK(r.checkpoint_paths == original.checkpoint_paths);
  CHECK(r.wall_seconds == original.wall_seconds);

  // Timing can be left out for reproducible output.
  write_results_json({original}, path, /*include_timing=*/false);
  CHECK(read_results_json(path)[0].wall_seconds == 0.0);
}

TEST_CASE("report reproduces the published comparison rows") {
  TempDir dir("report");
  write_report({sample_result()}, dir.path(), /*include_timing=*/false);

  const std::string cmp = slurp(dir.path() / "comparison.txt");
  CHECK(line_with_tokens(cmp, {"Our best model", "99.40", "99.00", "100.00", "99.47"}));
  CHECK(line_with_tokens(cmp, {"Li et al.", "72.90", "71.90", "79.20", "74.67"}));
  CHECK(line_with_tokens(cmp, {"ResNet-20", "99.40", "99.00", "100.0", "99.47"}));
  CHECK(line_with_tokens(cmp, {"MSR3D_AS1_d20", "93.75"}));
  CHECK(cmp.find("delta") != std::string::npos);

  CHECK(std::filesystem::exists(dir.path() / "results.json"));
  CHECK(std::filesystem::exists(dir.path() / "confusion_MSR3D_AS1_d20.txt"));
  CHECK(std::filesystem::exists(dir.path() / "curves_MSR3D_AS1_d20.tsv"));

  const std::string confusion = slurp(dir.path() / "confusion_MSR3D_AS1_d20.txt");
  CHECK(confusion.find("15 1") != std::string::npos);
  CHECK(confusion.find("0 16") != std::string::npos);
}

TEST_CASE("kard rows appear when kard results are reported") {
  TempDir dir("report_kard");
  ExperimentResult r = sample_result();
  r.dataset = "KARD";
  r.subset = "ActivitySet1";
  r.experiment = "B";
  write_report({r}, dir.path(), /*include_timing=*/false);
  const std::string cmp = slurp(dir.path() / "comparison.txt");
  CHECK(line_with_tokens(cmp, {"Ling et al.", "98.90", "99.60", "99.43"}));
  CHECK(line_with_tokens(cmp, {"Our best model", "99.87", "100.0", "99.93"}));
  CHECK(line_with_tokens(cmp, {"Gaglio et al.", "89.73", "94.50", "88.27"}));
}

TEST_CASE("report with no results is an error") {
  TempDir dir("report_empty");
  CHECK_THROWS_AS(write_report({}, dir.path()), DataError);
}

TEST_CASE("report output is byte-stable without timing") {
  TempDir dir("report_stable");
  const auto a = dir.path() / "a";
  const auto b = dir.path() / "b";
  write_report({sample_result()}, a, /*include_timing=*/false);
  write_report({sample_result()}, b, /*include_timing=*/false);
  CHECK(slurp(a / "results.json") == slurp(b / "results.json"));
  CHECK(slurp(a / "comparison.txt") == slurp(b / "comparison.txt"));
}
