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

#include "mgtdetect/report.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "mgtdetect/io.hpp"

namespace mgtdetect {

namespace {

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ", ";
    out += names[i];
  }
  return out;
}

std::string fixed4(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4f", value);
  return buffer;
}

std::string percent2(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f%%", value * 100.0);
  return buffer;
}

std::string render_row(const std::vector<std::string>& cells,
                       TableFormat format) {
  std::string out;
  if (format == TableFormat::markdown) {
    out += "|";
    for (const auto& cell : cells) {
      out += " ";
      out += cell;
      out += " |";
    }
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += "\t";
      out += cells[i];
    }
  }
  out += "\n";
  return out;
}

}  // namespace

const std::vector<std::string>& binary_metric_names() {
  static const std::vector<std::string> names = {"roc_auc", "brier", "c_at_1",
                                                 "f1",      "f05u",  "mean"};
  return names;
}

const std::vector<std::string>& multiclass_metric_names() {
  static const std::vector<std::string> names = {
      "macro_recall", "macro_precision", "macro_f1", "accuracy"};
  return names;
}

double metric_value(const AnyReport& report, const std::string& name) {
  if (const auto* binary = std::get_if<BinaryReport>(&report)) {
    if (name == "roc_auc") return binary->roc_auc;
    if (name == "brier") return binary->brier;
    if (name == "c_at_1") return binary->c_at_1;
    if (name == "f1") return binary->f1;
    if (name == "f05u") return binary->f05u;
    if (name == "mean") return binary->mean;
    throw DataError("\"" + name + "\" is not a binary metric; expected one of " +
                    join_names(binary_metric_names()));
  }
  const auto& multiclass = std::get<MulticlassReport>(report);
  if (name == "macro_recall") return multiclass.macro_recall;
  if (name == "macro_precision") return multiclass.macro_precision;
  if (name == "macro_f1") return multiclass.macro_f1;
  if (name == "accuracy") return multiclass.accuracy;
  throw DataError("\"" + name + "\" is not a multiclass metric; expected one of " +
                  join_names(multiclass_metric_names()));
}

std::vector<RankedEntry> rank_entries(const Leaderboard& board) {
  if (board.entries.empty()) {
    throw DataError("leaderboard has no entries");
  }
  std::set<std::string> names;
  for (const auto& entry : board.entries) {
    if (!names.insert(entry.system_name).second) {
      throw DataError("duplicate system name \"" + entry.system_name + "\"");
    }
    if (entry.report.index() != board.entries.front().report.index()) {
      throw DataError("mixed report types in one leaderboard");
    }
  }

  std::vector<std::size_t> order(board.entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto value_of = [&](std::size_t i) {
    return metric_value(board.entries[i].report, board.ranking_metric);
  };
  value_of(0);  // reject an unknown ranking metric even for trivial boards
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return value_of(a) > value_of(b);
                   });

  std::vector<RankedEntry> ranked;
  ranked.reserve(order.size());
  for (std::size_t position = 0; position < order.size(); ++position) {
    std::size_t rank = position + 1;
    if (position > 0 && value_of(order[position]) ==
                            value_of(order[position - 1])) {
      rank = ranked.back().rank;
    }
    ranked.push_back(RankedEntry{rank, board.entries[order[position]]});
  }
  return ranked;
}

std::string render_table(const Leaderboard& board, TableFormat format) {
  const auto ranked = rank_entries(board);
  const bool binary =
      std::holds_alternative<BinaryReport>(ranked.front().entry.report);

  std::vector<std::string> header;
  if (binary) {
    header = {"System", "ROC-AUC", "Brier", "C@1", "F1", "F0.5u", "Mean"};
  } else {
    header = {"Rank",     "System",          "Macro Recall",
              "Macro Precision", "Macro F1", "Accuracy"};
  }

  std::string out = render_row(header, format);
  if (format == TableFormat::markdown) {
    out += render_row(std::vector<std::string>(header.size(), "---"), format);
  }
  for (const auto& ranked_entry : ranked) {
    std::vector<std::string> cells;
    if (binary) {
      const auto& report = std::get<BinaryReport>(ranked_entry.entry.report);
      cells = {ranked_entry.entry.system_name, fixed4(report.roc_auc),
               fixed4(report.brier),           fixed4(report.c_at_1),
               fixed4(report.f1),              fixed4(report.f05u),
               fixed4(report.mean)};
    } else {
      const auto& report =
          std::get<MulticlassReport>(ranked_entry.entry.report);
      cells = {std::to_string(ranked_entry.rank),
               ranked_entry.entry.system_name,
               percent2(report.macro_recall),
               percent2(report.macro_precision),
               percent2(report.macro_f1),
               percent2(report.accuracy)};
    }
    out += render_row(cells, format);
  }
  return out;
}

BinaryDelta robustness_delta(const BinaryReport& clean,
                             const BinaryReport& attacked) {
  BinaryDelta delta;
  delta.roc_auc = attacked.roc_auc - clean.roc_auc;
  delta.brier = attacked.brier - clean.brier;
  delta.c_at_1 = attacked.c_at_1 - clean.c_at_1;
  delta.f1 = attacked.f1 - clean.f1;
  delta.f05u = attacked.f05u - clean.f05u;
  delta.mean = attacked.mean - clean.mean;
  return delta;
}

MulticlassDelta robustness_delta(const MulticlassReport& clean,
                                 const MulticlassReport& attacked) {
  MulticlassDelta delta;
  delta.macro_recall = attacked.macro_recall - clean.macro_recall;
  delta.macro_precision = attacked.macro_precision - clean.macro_precision;
  delta.macro_f1 = attacked.macro_f1 - clean.macro_f1;
  delta.accuracy = attacked.accuracy - clean.accuracy;
  return delta;
}

AnyDelta robustness_delta(const AnyReport& clean, const AnyReport& attacked) {
  if (clean.index() != attacked.index()) {
    throw DataError(
        "robustness delta needs two reports of the same type; got one binary "
        "and one multiclass report");
  }
  if (const auto* binary = std::get_if<BinaryReport>(&clean)) {
    return robustness_delta(*binary, std::get<BinaryReport>(attacked));
  }
  return robustness_delta(std::get<MulticlassReport>(clean),
                          std::get<MulticlassReport>(attacked));
}

nlohmann::ordered_json report_to_json(const AnyReport& report) {
  nlohmann::ordered_json j;
  if (const auto* binary = std::get_if<BinaryReport>(&report)) {
    j["type"] = "binary";
    j["roc_auc"] = binary->roc_auc;
    j["brier"] = binary->brier;
    j["c_at_1"] = binary->c_at_1;
    j["f1"] = binary->f1;
    j["f05u"] = binary->f05u;
    j["mean"] = binary->mean;
    return j;
  }
  const auto& multiclass = std::get<MulticlassReport>(report);
  j["type"] = "multiclass";
  j["macro_recall"] = multiclass.macro_recall;
  j["macro_precision"] = multiclass.macro_precision;
  j["macro_f1"] = multiclass.macro_f1;
  j["accuracy"] = multiclass.accuracy;
  j["confusion"] = multiclass.confusion;
  return j;
}

AnyReport report_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw DataError("report JSON needs a \"type\" of \"binary\" or "
                    "\"multiclass\"");
  }
  const auto type = j.at("type").get<std::string>();
  auto number = [&](const char* field) {
    if (!j.contains(field) || !j.at(field).is_number()) {
      throw DataError(std::string("report JSON needs a numeric \"") + field +
                      "\"");
    }
    return j.at(field).get<double>();
  };
  if (type == "binary") {
    BinaryReport report;
    report.roc_auc = number("roc_auc");
    report.brier = number("brier");
    report.c_at_1 = number("c_at_1");
    report.f1 = number("f1");
    report.f05u = number("f05u");
    report.mean = number("mean");
    return report;
  }
  if (type == "multiclass") {
    MulticlassReport report;
    report.macro_recall = number("macro_recall");
    report.macro_precision = number("macro_precision");
    report.macro_f1 = number("macro_f1");
    report.accuracy = number("accuracy");
    if (j.contains("confusion")) {
      const auto& confusion = j.at("confusion");
      if (!confusion.is_array()) {
        throw DataError("report confusion must be an array of rows");
      }
      for (const auto& row : confusion) {
        if (!row.is_array() || row.size() != confusion.size()) {
          throw DataError("report confusion matrix must be square");
        }
        std::vector<std::size_t> cells;
        for (const auto& cell : row) {
          if (!cell.is_number_unsigned()) {
            throw DataError(
                "report confusion cells must be non-negative integers");
          }
          cells.push_back(cell.get<std::size_t>());
        }
        report.confusion.push_back(std::move(cells));
      }
    }
    return report;
  }
  throw DataError("unknown report type \"" + type + "\"");
}

void save_report(const AnyReport& report, const std::filesystem::path& path) {
  atomic_write_file(path, report_to_json(report).dump(2) + "\n");
}

AnyReport load_report(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": invalid report JSON: " + e.what());
  }
  try {
    return report_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": invalid report JSON: " + e.what());
  }
}

}  // namespace mgtdetect
