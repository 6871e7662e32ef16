// Copyright 2025 The mgtdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mgtdetect/metrics.hpp"

namespace mgtdetect {

// Leaderboard-style aggregation: many systems, one metric suite each, ranked
// by a chosen metric and rendered as a table.

using AnyReport = std::variant<BinaryReport, MulticlassReport>;

struct LeaderboardEntry {
  std::string system_name;
  AnyReport report;
};

struct Leaderboard {
  std::vector<LeaderboardEntry> entries;
  // Field name of the entry report type, e.g. "mean" or "macro_recall".
  std::string ranking_metric;
};

struct RankedEntry {
  std::size_t rank = 0;  // competition ranking: ties share the smaller rank
  LeaderboardEntry entry;
};

/// Metric field names of each report type, in declaration order.
const std::vector<std::string>& binary_metric_names();
const std::vector<std::string>& multiclass_metric_names();

/// Reads the named metric field. Throws DataError for an unknown name.
double metric_value(const AnyReport& report, const std::string& name);

/// Orders entries descending by the ranking metric, stable by insertion order
/// within ties, and assigns competition ranks (tied entries share the smaller
/// rank; the next distinct value skips past them). Throws DataError for an
/// empty board, duplicate system names, mixed report types, or a ranking
/// metric that is not a field of the entry report type.
std::vector<RankedEntry> rank_entries(const Leaderboard& board);

enum class TableFormat { markdown, tsv };

/// Renders the board in rank order. Binary boards print System plus the five
/// metrics and Mean, fixed to 4 decimals. Multiclass boards print Rank,
/// System, and the four metrics as percentages with 2 decimals. The TSV
/// format is one header line plus one line per entry; markdown adds the
/// separator row after the header.
std::string render_table(const Leaderboard& board, TableFormat format);

struct BinaryDelta {
  double roc_auc = 0.0;
  double brier = 0.0;
  double c_at_1 = 0.0;
  double f1 = 0.0;
  double f05u = 0.0;
  double mean = 0.0;

  bool operator==(const BinaryDelta&) const = default;
};

struct MulticlassDelta {
  double macro_recall = 0.0;
  double macro_precision = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;

  bool operator==(const MulticlassDelta&) const = default;
};

using AnyDelta = std::variant<BinaryDelta, MulticlassDelta>;

/// Per-metric signed differences, attacked minus clean: negative values mean
/// the attack degraded that metric.
BinaryDelta robustness_delta(const BinaryReport& clean,
                             const BinaryReport& attacked);
MulticlassDelta robustness_delta(const MulticlassReport& clean,
                                 const MulticlassReport& attacked);
/// Variant form; throws DataError when the report types differ.
AnyDelta robustness_delta(const AnyReport& clean, const AnyReport& attacked);

/// JSON with a "type" tag ("binary" or "multiclass") so files round-trip
/// through load_report without out-of-band type information.
nlohmann::ordered_json report_to_json(const AnyReport& report);
AnyReport report_from_json(const nlohmann::json& j);
void save_report(const AnyReport& report, const std::filesystem::path& path);
AnyReport load_report(const std::filesystem::path& path);

}  // namespace mgtdetect
