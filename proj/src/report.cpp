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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace skelact {
namespace baselines {

// Accuracy cells keep the exact text they were published with; parse the
// text when arithmetic is needed.

const std::vector<std::pair<int, ReferenceRow>>& msr3d_resnet_reference() {
  static const std::vector<std::pair<int, ReferenceRow>> rows = {
      {20, {"ResNet-20", {"99.40", "99.00", "100.0", "99.47"}}},
      {32, {"ResNet-32", {"99.50", "98.70", "99.70", "99.30"}}},
      {44, {"ResNet-44", {"99.60", "98.20", "99.80", "99.20"}}},
      {56, {"ResNet-56", {"99.20", "97.30", "99.60", "98.70"}}},
      {110, {"ResNet-110", {"99.20", "98.00", "99.90", "99.37"}}},
  };
  return rows;
}

const std::vector<KardReferenceRow>& kard_resnet_reference() {
  static const std::vector<KardReferenceRow> rows = {
      {1, 20, {"100", "100", "100"}},  {1, 32, {"100", "100", "100"}},
      {1, 44, {"100", "100", "99.9"}}, {1, 56, {"100", "100", "99.9"}},
      {1, 110, {"99.7", "100", "100"}},
      {2, 20, {"100", "100", "100"}},  {2, 32, {"100", "100", "99.9"}},
      {2, 44, {"100", "100", "100"}},  {2, 56, {"100", "100", "100"}},
      {2, 110, {"99.9", "100", "100"}},
      {3, 20, {"99.8", "100", "99.8"}}, {3, 32, {"99.8", "99.9", "99.8"}},
      {3, 44, {"99.0", "99.7", "99.7"}}, {3, 56, {"99.4", "99.9", "99.8"}},
      {3, 110, {"99.1", "100", "99.7"}},
  };
  return rows;
}

const std::vector<ReferenceRow>& msr3d_method_comparison() {
  static const std::vector<ReferenceRow> rows = {
      {"Li et al. (2010)", {"72.90", "71.90", "79.20", "74.67"}},
      {"Vieira et al. (2012)", {"84.70", "81.30", "88.40", "84.80"}},
      {"Xia et al. (2012)", {"87.98", "85.48", "63.46", "78.97"}},
      {"Chaaraoui et al. (2013)", {"92.38", "86.61", "96.40", "91.80"}},
      {"Chen et al. (2013)", {"96.20", "83.20", "92.00", "90.47"}},
      {"Luo et al. (2013)", {"97.20", "95.50", "99.10", "97.26"}},
      {"Gowayyed et al. (2013)", {"92.39", "90.18", "91.43", "91.26"}},
      {"Hussein et al. (2013)", {"88.04", "89.29", "94.29", "90.53"}},
      {"Qin et al. (2013)", {"81.00", "79.00", "82.00", "80.66"}},
      {"Liang et al. (2013)", {"73.70", "81.50", "81.60", "78.93"}},
      {"Evangelidis et al. (2014)", {"88.39", "86.61", "94.59", "89.86"}},
      {"Ilias et al. (2014)", {"91.23", "90.09", "99.50", "93.61"}},
      {"Gao et al. (2014)", {"92.00", "85.00", "93.00", "90.00"}},
      {"Vieira et al. (2014)", {"91.70", "72.20", "98.60", "87.50"}},
      {"Chen et al. (2015)", {"98.10", "92.00", "94.60", "94.90"}},
      {"Du et al. (2015)", {"93.33", "94.64", "95.50", "94.49"}},
      {"Our best model", {"99.40", "99.00", "100.00", "99.47"}},
  };
  return rows;
}

const std::vector<ReferenceRow>& kard_method_comparison() {
  static const std::vector<ReferenceRow> rows = {
      {"Gaglio et al. (2015)", {"89.73", "94.50", "88.27"}},
      {"Cippitelli et al. (2016), P = 7", {"96.03", "97.80", "96.37"}},
      {"Cippitelli et al. (2016), P = 11", {"96.47", "98.27", "96.87"}},
      {"Cippitelli et al. (2016), P = 15", {"96.00", "97.97", "96.80"}},
      {"Ling et al. (2016)", {"98.90", "99.60", "99.43"}},
      {"Our best model", {"99.87", "100.0", "99.93"}},
  };
  return rows;
}

}  // namespace baselines

std::string format_percent(double value) {
  const double rounded = std::floor(value * 100.0 + 0.5) / 100.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", rounded);
  return buf;
}

namespace {

using nlohmann::json;

json result_to_json(const ExperimentResult& r, bool include_timing) {
  json j;
  j["dataset"] = r.dataset;
  j["subset"] = r.subset;
  j["experiment"] = r.experiment;
  j["depth"] = r.depth;
  j["seed"] = r.seed;
  j["class_names"] = r.class_names;
  j["per_split_accuracy"] = r.per_split_accuracy;
  j["mean_accuracy"] = r.mean_accuracy;
  j["confusion"] = r.confusion;
  json curves = json::array();
  for (const auto& [train_err, test_err] : r.curves) curves.push_back({train_err, test_err});
  j["curves"] = curves;
  j["checkpoints"] = r.checkpoint_paths;
  if (include_timing) j["wall_seconds"] = r.wall_seconds;
  return j;
}

ExperimentResult result_from_json(const json& j) {
  ExperimentResult r;
  r.dataset = j.at("dataset").get<std::string>();
  r.subset = j.at("subset").get<std::string>();
  r.experiment = j.value("experiment", std::string());
  r.depth = j.at("depth").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.class_names = j.value("class_names", std::vector<std::string>());
  r.per_split_accuracy = j.at("per_split_accuracy").get<std::vector<double>>();
  r.mean_accuracy = j.at("mean_accuracy").get<double>();
  r.confusion = j.value("confusion", std::vector<std::vector<std::int64_t>>());
  for (const auto& pair : j.value("curves", json::array()))
    r.curves.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  r.checkpoint_paths = j.value("checkpoints", std::vector<std::string>());
  r.wall_seconds = j.value("wall_seconds", 0.0);
  return r;
}

void atomic_write(const std::filesystem::path& path, const std::string& payload) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + tmp.string());
    out << payload;
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string result_label(const ExperimentResult& r) {
  std::string label = r.dataset + "_" + r.subset;
  if (!r.experiment.empty()) label += "_exp" + r.experiment;
  label += "_d" + std::to_string(r.depth);
  return label;
}

void append_row(std::ostringstream& os, const std::string& method,
                const std::vector<const char*>& cells, const std::string& extra = "") {
  os << std::left << std::setw(34) << method << std::right;
  for (const char* cell : cells) os << std::setw(9) << cell;
  if (!extra.empty()) os << "  " << extra;
  os << '\n';
}

void append_row(std::ostringstream& os, const std::string& method,
                const std::vector<std::string>& cells, const std::string& extra = "") {
  os << std::left << std::setw(34) << method << std::right;
  for (const auto& cell : cells) os << std::setw(9) << cell;
  if (!extra.empty()) os << "  " << extra;
  os << '\n';
}

int msr_subset_index(const std::string& subset) {
  if (subset == "AS1") return 0;
  if (subset == "AS2") return 1;
  if (subset == "AS3") return 2;
  return -1;
}

int kard_set_index(const std::string& subset) {
  if (subset == "ActivitySet1") return 1;
  if (subset == "ActivitySet2") return 2;
  if (subset == "ActivitySet3") return 3;
  return -1;
}

std::string delta_note(double ours, const char* reference_cell) {
  const double reference = std::strtod(reference_cell, nullptr);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "delta %+.2f", ours - reference);
  return buf;
}

}  // namespace

void write_results_json(const std::vector<ExperimentResult>& results,
                        const std::filesystem::path& path, bool include_timing) {
  json arr = json::array();
  for (const auto& r : results) arr.push_back(result_to_json(r, include_timing));
  atomic_write(path, arr.dump(2) + "\n");
}

std::vector<ExperimentResult> read_results_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open results file: " + path.string());
  json arr = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (arr.is_discarded() || !arr.is_array())
    throw DataError("malformed results file: " + path.string());
  std::vector<ExperimentResult> results;
  for (const auto& j : arr) results.push_back(result_from_json(j));
  return results;
}

void write_report(const std::vector<ExperimentResult>& results,
                  const std::filesystem::path& out_dir, bool include_timing) {
  if (results.empty()) throw DataError("report: no results to report");
  std::filesystem::create_directories(out_dir);

  write_results_json(results, out_dir / "results.json", include_timing);

  // Per-result confusion matrices and learning curves.
  for (const auto& r : results) {
    std::ostringstream confusion;
    confusion << "# rows: true class, columns: predicted class\n";
    for (std::size_t i = 0; i < r.class_names.size(); ++i)
      confusion << "# " << i << ": " << r.class_names[i] << '\n';
    for (const auto& row : r.confusion) {
      for (std::size_t j = 0; j < row.size(); ++j) confusion << (j ? " " : "") << row[j];
      confusion << '\n';
    }
    atomic_write(out_dir / ("confusion_" + result_label(r) + ".txt"), confusion.str());

    std::ostringstream curves;
    curves << "epoch\ttrain_error\ttest_error\n";
    for (std::size_t e = 0; e < r.curves.size(); ++e)
      curves << e << '\t' << r.curves[e].first << '\t' << r.curves[e].second << '\n';
    atomic_write(out_dir / ("curves_" + result_label(r) + ".tsv"), curves.str());
  }

  // Comparison against the published tables.
  std::ostringstream cmp;
  bool any_msr = false, any_kard = false;
  for (const auto& r : results) (r.dataset == "MSR3D" ? any_msr : any_kard) = true;

  cmp << "Obtained results\n";
  cmp << "----------------\n";
  for (const auto& r : results) {
    std::vector<std::string> cells;
    for (double acc : r.per_split_accuracy) cells.push_back(format_percent(acc));
    std::string extra = "mean " + format_percent(r.mean_accuracy);

    if (r.dataset == "MSR3D") {
      const int subset = msr_subset_index(r.subset);
      for (const auto& [depth, row] : baselines::msr3d_resnet_reference())
        if (depth == r.depth && subset >= 0)
          extra += "  vs " + std::string(row.method) + " " + row.cells[subset] + " (" +
                   delta_note(r.mean_accuracy, row.cells[subset]) + ")";
    } else if (!r.experiment.empty()) {
      const int set = kard_set_index(r.subset);
      const int exp = r.experiment[0] - 'A';
      for (const auto& row : baselines::kard_resnet_reference())
        if (row.set == set && row.depth == r.depth && exp >= 0 && exp < 3)
          extra += "  vs ResNet-" + std::to_string(row.depth) + " " + row.cells[exp] + " (" +
                   delta_note(r.mean_accuracy, row.cells[exp]) + ")";
    }
    append_row(cmp, result_label(r), cells, extra);
  }
  cmp << '\n';

  if (any_msr) {
    cmp << "Reference models (MSR Action 3D)          AS1      AS2      AS3    Aver.\n";
    cmp << "-------------------------------------------------------------------------\n";
    for (const auto& [depth, row] : baselines::msr3d_resnet_reference())
      append_row(cmp, row.method, row.cells);
    cmp << '\n';
    cmp << "Published comparison (MSR Action 3D)      AS1      AS2      AS3    Aver.\n";
    cmp << "-------------------------------------------------------------------------\n";
    for (const auto& row : baselines::msr3d_method_comparison())
      append_row(cmp, row.method, row.cells);
    cmp << '\n';
  }
  if (any_kard) {
    cmp << "Reference models (KARD)                Exp. A   Exp. B   Exp. C\n";
    cmp << "----------------------------------------------------------------\n";
    for (const auto& row : baselines::kard_resnet_reference())
      append_row(cmp, "Set " + std::to_string(row.set) + " ResNet-" + std::to_string(row.depth),
                 row.cells);
    cmp << '\n';
    cmp << "Published comparison (whole KARD)      Exp. A   Exp. B   Exp. C\n";
    cmp << "----------------------------------------------------------------\n";
    for (const auto& row : baselines::kard_method_comparison())
      append_row(cmp, row.method, row.cells);
    cmp << '\n';
  }
  atomic_write(out_dir / "comparison.txt", cmp.str());
}

}  // namespace skelact
