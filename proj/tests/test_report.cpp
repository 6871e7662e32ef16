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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "mgtdetect/report.hpp"
#include "mgtdetect/rng.hpp"
#include "test_util.hpp"

using namespace mgtdetect;
using mgtdetect::testing::TempDir;
using doctest::Contains;

namespace {

MulticlassReport multiclass_with_recall(double macro_recall) {
  MulticlassReport report;
  report.macro_recall = macro_recall;
  report.macro_precision = 0.5;
  report.macro_f1 = 0.5;
  report.accuracy = 0.5;
  return report;
}

BinaryReport binary_with_mean(double mean) {
  BinaryReport report;
  report.roc_auc = mean;
  report.brier = mean;
  report.c_at_1 = mean;
  report.f1 = mean;
  report.f05u = mean;
  report.mean = mean;
  return report;
}

Leaderboard recall_board(const std::vector<double>& recalls) {
  Leaderboard board;
  board.ranking_metric = "macro_recall";
  for (std::size_t i = 0; i < recalls.size(); ++i) {
    board.entries.push_back(LeaderboardEntry{
        "team" + std::to_string(i), multiclass_with_recall(recalls[i])});
  }
  return board;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) lines.push_back(current);
  return lines;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::string current;
  for (char c : line) {
    if (c == '\t') {
      cells.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  cells.push_back(current);
  return cells;
}

}  // namespace

TEST_CASE("official leaderboard recalls rank 1, 2, 3") {
  const auto board = recall_board({0.6446, 0.6172, 0.6016});
  const auto ranked = rank_entries(board);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].rank == 1);
  CHECK(ranked[1].rank == 2);
  CHECK(ranked[2].rank == 3);
  CHECK(ranked[0].entry.system_name == "team0");
  CHECK(ranked[2].entry.system_name == "team2");
}

TEST_CASE("competition ranking shares the smaller rank and skips") {
  const auto ranked = rank_entries(recall_board({0.5, 0.5, 0.4}));
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].rank == 1);
  CHECK(ranked[1].rank == 1);
  CHECK(ranked[2].rank == 3);

  const auto four = rank_entries(recall_board({0.4, 0.5, 0.5, 0.5}));
  CHECK(four[0].rank == 1);
  CHECK(four[1].rank == 1);
  CHECK(four[2].rank == 1);
  CHECK(four[3].rank == 4);
  CHECK(four[3].entry.system_name == "team0");
}

TEST_CASE("a single entry gets rank 1") {
  const auto ranked = rank_entries(recall_board({0.37}));
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].rank == 1);
}

TEST_CASE("ties keep insertion order") {
  Leaderboard board;
  board.ranking_metric = "mean";
  board.entries.push_back(LeaderboardEntry{"later-high", binary_with_mean(0.9)});
  board.entries.push_back(LeaderboardEntry{"first-tied", binary_with_mean(0.5)});
  board.entries.push_back(LeaderboardEntry{"second-tied", binary_with_mean(0.5)});
  const auto ranked = rank_entries(board);
  CHECK(ranked[0].entry.system_name == "later-high");
  CHECK(ranked[1].entry.system_name == "first-tied");
  CHECK(ranked[2].entry.system_name == "second-tied");
  CHECK(ranked[1].rank == 2);
  CHECK(ranked[2].rank == 2);
}

TEST_CASE("ranking is a permutation with the maximum at rank 1") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.next_below(12);
    std::vector<double> recalls;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid so ties happen often.
      recalls.push_back(static_cast<double>(rng.next_below(4)) / 4.0);
    }
    const auto board = recall_board(recalls);
    const auto ranked = rank_entries(board);
    REQUIRE(ranked.size() == n);

    std::set<std::string> seen;
    for (const auto& r : ranked) seen.insert(r.entry.system_name);
    CHECK(seen.size() == n);

    const double top = *std::max_element(recalls.begin(), recalls.end());
    CHECK(ranked[0].rank == 1);
    CHECK(metric_value(ranked[0].entry.report, "macro_recall") == top);
    for (std::size_t i = 1; i < ranked.size(); ++i) {
      const double previous =
          metric_value(ranked[i - 1].entry.report, "macro_recall");
      const double current =
          metric_value(ranked[i].entry.report, "macro_recall");
      CHECK(previous >= current);
      if (current == previous) {
        CHECK(ranked[i].rank == ranked[i - 1].rank);
      } else {
        CHECK(ranked[i].rank == i + 1);
      }
    }
  }
}

TEST_CASE("rank_entries validates the board") {
  CHECK_THROWS_WITH_AS(rank_entries(Leaderboard{{}, "mean"}),
                       Contains("no entries"), DataError);

  Leaderboard duplicate;
  duplicate.ranking_metric = "mean";
  duplicate.entries.push_back(LeaderboardEntry{"same", binary_with_mean(0.1)});
  duplicate.entries.push_back(LeaderboardEntry{"same", binary_with_mean(0.2)});
  CHECK_THROWS_WITH_AS(rank_entries(duplicate),
                       Contains("duplicate system name \"same\""), DataError);

  Leaderboard mixed;
  mixed.ranking_metric = "mean";
  mixed.entries.push_back(LeaderboardEntry{"a", binary_with_mean(0.1)});
  mixed.entries.push_back(LeaderboardEntry{"b", multiclass_with_recall(0.5)});
  CHECK_THROWS_WITH_AS(rank_entries(mixed), Contains("mixed report types"),
                       DataError);

  Leaderboard wrong_metric;
  wrong_metric.ranking_metric = "macro_recall";
  wrong_metric.entries.push_back(LeaderboardEntry{"a", binary_with_mean(0.1)});
  CHECK_THROWS_WITH_AS(rank_entries(wrong_metric),
                       Contains("not a binary metric"), DataError);
  CHECK_THROWS_WITH_AS(rank_entries(wrong_metric), Contains("roc_auc"),
                       DataError);

  Leaderboard unknown;
  unknown.ranking_metric = "elo";
  unknown.entries.push_back(LeaderboardEntry{"a", multiclass_with_recall(0.5)});
  CHECK_THROWS_WITH_AS(rank_entries(unknown),
                       Contains("not a multiclass metric"), DataError);
}

TEST_CASE("binary table renders seven fixed-point columns") {
  Leaderboard board;
  board.ranking_metric = "mean";
  BinaryReport report;
  report.roc_auc = 0.9784;
  report.brier = 0.9207;
  report.c_at_1 = 0.9478;
  report.f1 = 0.9523;
  report.f05u = 0.9644;
  report.mean = 0.9527;
  board.entries.push_back(LeaderboardEntry{"sys", report});

  const auto tsv = render_table(board, TableFormat::tsv);
  CHECK(tsv ==
        "System\tROC-AUC\tBrier\tC@1\tF1\tF0.5u\tMean\n"
        "sys\t0.9784\t0.9207\t0.9478\t0.9523\t0.9644\t0.9527\n");
  const auto tsv_lines = lines_of(tsv);
  REQUIRE(tsv_lines.size() == 2);
  CHECK(split_tabs(tsv_lines[0]).size() == 7);
  CHECK(split_tabs(tsv_lines[1]).size() == 7);

  const auto markdown = render_table(board, TableFormat::markdown);
  CHECK(markdown ==
        "| System | ROC-AUC | Brier | C@1 | F1 | F0.5u | Mean |\n"
        "| --- | --- | --- | --- | --- | --- | --- |\n"
        "| sys | 0.9784 | 0.9207 | 0.9478 | 0.9523 | 0.9644 | 0.9527 |\n");
}

TEST_CASE("multiclass table renders ranked percentage rows") {
  Leaderboard board;
  board.ranking_metric = "macro_recall";
  MulticlassReport first;
  first.macro_recall = 0.6446;
  first.macro_precision = 0.6;
  first.macro_f1 = 0.6506;
  first.accuracy = 0.7409;
  MulticlassReport second;
  second.macro_recall = 0.6172;
  second.macro_precision = 0.55;
  second.macro_f1 = 0.6173;
  second.accuracy = 0.6928;
  board.entries.push_back(LeaderboardEntry{"frontrunner", first});
  board.entries.push_back(LeaderboardEntry{"runner-up", second});

  const auto tsv = render_table(board, TableFormat::tsv);
  CHECK(tsv ==
        "Rank\tSystem\tMacro Recall\tMacro Precision\tMacro F1\tAccuracy\n"
        "1\tfrontrunner\t64.46%\t60.00%\t65.06%\t74.09%\n"
        "2\trunner-up\t61.72%\t55.00%\t61.73%\t69.28%\n");
  const auto cells = split_tabs(lines_of(tsv)[1]);
  CHECK(cells[2] == "64.46%");

  const auto markdown = render_table(board, TableFormat::markdown);
  CHECK(markdown ==
        "| Rank | System | Macro Recall | Macro Precision | Macro F1 | "
        "Accuracy |\n"
        "| --- | --- | --- | --- | --- | --- |\n"
        "| 1 | frontrunner | 64.46% | 60.00% | 65.06% | 74.09% |\n"
        "| 2 | runner-up | 61.72% | 55.00% | 61.73% | 69.28% |\n");
}

TEST_CASE("rendering is deterministic and precision-sensitive") {
  const auto board = recall_board({0.7006, 0.6172});
  CHECK(render_table(board, TableFormat::markdown) ==
        render_table(board, TableFormat::markdown));
  CHECK(render_table(board, TableFormat::tsv) ==
        render_table(board, TableFormat::tsv));

  // A change below the printed precision renders identically; a change at
  // the fourth percent decimal place does not.
  const auto nudged_below = recall_board({0.7006 + 1e-7, 0.6172});
  CHECK(render_table(board, TableFormat::tsv) ==
        render_table(nudged_below, TableFormat::tsv));
  const auto nudged_above = recall_board({0.7106, 0.6172});
  CHECK(render_table(board, TableFormat::tsv) !=
        render_table(nudged_above, TableFormat::tsv));
}

TEST_CASE("robustness deltas subtract per metric") {
  SUBCASE("identical reports give zero deltas") {
    const auto binary = binary_with_mean(0.42);
    CHECK(robustness_delta(binary, binary) == BinaryDelta{});
    const auto multiclass = multiclass_with_recall(0.42);
    CHECK(robustness_delta(multiclass, multiclass) == MulticlassDelta{});
  }
  SUBCASE("degradation is negative") {
    const auto delta =
        robustness_delta(binary_with_mean(0.9), binary_with_mean(0.7));
    CHECK(std::abs(delta.mean - (-0.2)) <= 1e-15);
    CHECK(std::abs(delta.roc_auc - (-0.2)) <= 1e-15);
  }
  SUBCASE("anti-symmetry is exact") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = binary_with_mean(rng.next_double());
      const auto b = binary_with_mean(rng.next_double());
      const auto forward = robustness_delta(a, b);
      const auto backward = robustness_delta(b, a);
      CHECK(forward.mean == -backward.mean);
      CHECK(forward.f05u == -backward.f05u);

      const auto ma = multiclass_with_recall(rng.next_double());
      const auto mb = multiclass_with_recall(rng.next_double());
      CHECK(robustness_delta(ma, mb).macro_recall ==
            -robustness_delta(mb, ma).macro_recall);
    }
  }
  SUBCASE("mismatched report types are rejected") {
    const AnyReport binary = binary_with_mean(0.5);
    const AnyReport multiclass = multiclass_with_recall(0.5);
    CHECK_THROWS_WITH_AS(robustness_delta(binary, multiclass),
                         Contains("same type"), DataError);
    const auto delta = robustness_delta(binary, AnyReport{binary_with_mean(0.6)});
    CHECK(std::holds_alternative<BinaryDelta>(delta));
  }
}

TEST_CASE("report JSON round-trips with type detection") {
  TempDir tmp;
  BinaryReport binary;
  binary.roc_auc = 0.9784;
  binary.brier = 0.9207;
  binary.c_at_1 = 0.9478;
  binary.f1 = 0.9523;
  binary.f05u = 0.9644;
  binary.mean = 0.9527;
  const auto binary_path = tmp.path() / "binary.json";
  save_report(binary, binary_path);
  const auto binary_loaded = load_report(binary_path);
  REQUIRE(std::holds_alternative<BinaryReport>(binary_loaded));
  CHECK(std::get<BinaryReport>(binary_loaded) == binary);

  MulticlassReport multiclass;
  multiclass.macro_recall = 0.9727;
  multiclass.macro_precision = 0.9523;
  multiclass.macro_f1 = 0.9617;
  multiclass.accuracy = 0.9934;
  multiclass.confusion = {{4, 1}, {0, 5}};
  const auto multiclass_path = tmp.path() / "multiclass.json";
  save_report(multiclass, multiclass_path);
  const auto multiclass_loaded = load_report(multiclass_path);
  REQUIRE(std::holds_alternative<MulticlassReport>(multiclass_loaded));
  CHECK(std::get<MulticlassReport>(multiclass_loaded) == multiclass);
}

TEST_CASE("report loader rejects malformed input") {
  TempDir tmp;
  CHECK_THROWS_WITH_AS(load_report(tmp.write("a.json", "{nope")),
                       Contains("invalid report JSON"), DataError);
  CHECK_THROWS_WITH_AS(load_report(tmp.write("b.json", "{\"roc_auc\":1}")),
                       Contains("\"type\""), DataError);
  CHECK_THROWS_WITH_AS(load_report(tmp.write("c.json", "{\"type\":\"pdf\"}")),
                       Contains("unknown report type \"pdf\""), DataError);
  CHECK_THROWS_WITH_AS(
      load_report(tmp.write("d.json",
                            "{\"type\":\"binary\",\"roc_auc\":1,\"brier\":1,"
                            "\"c_at_1\":1,\"f1\":1,\"f05u\":\"high\","
                            "\"mean\":1}")),
      Contains("numeric \"f05u\""), DataError);
  CHECK_THROWS_WITH_AS(
      load_report(tmp.write("e.json",
                            "{\"type\":\"multiclass\",\"macro_recall\":1,"
                            "\"macro_precision\":1,\"macro_f1\":1,"
                            "\"accuracy\":1,\"confusion\":[[1,2],[3]]}")),
      Contains("square"), DataError);
  CHECK_THROWS_WITH_AS(
      load_report(tmp.write("f.json",
                            "{\"type\":\"multiclass\",\"macro_recall\":1,"
                            "\"macro_precision\":1,\"macro_f1\":1,"
                            "\"accuracy\":1,\"confusion\":[[1,-2],[3,4]]}")),
      Contains("non-negative integers"), DataError);
}

TEST_CASE("metric_value reads every declared field") {
  BinaryReport binary;
  binary.roc_auc = 0.1;
  binary.brier = 0.2;
  binary.c_at_1 = 0.3;
  binary.f1 = 0.4;
  binary.f05u = 0.5;
  binary.mean = 0.6;
  const AnyReport any_binary = binary;
  const std::vector<double> binary_values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  for (std::size_t i = 0; i < binary_metric_names().size(); ++i) {
    CHECK(metric_value(any_binary, binary_metric_names()[i]) ==
          binary_values[i]);
  }

  MulticlassReport multiclass;
  multiclass.macro_recall = 0.7;
  multiclass.macro_precision = 0.8;
  multiclass.macro_f1 = 0.9;
  multiclass.accuracy = 1.0;
  const AnyReport any_multiclass = multiclass;
  const std::vector<double> multiclass_values = {0.7, 0.8, 0.9, 1.0};
  for (std::size_t i = 0; i < multiclass_metric_names().size(); ++i) {
    CHECK(metric_value(any_multiclass, multiclass_metric_names()[i]) ==
          multiclass_values[i]);
  }
}
