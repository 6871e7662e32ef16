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
#include <utility>
#include <vector>

#include "mgtdetect/corpus.hpp"

namespace mgtdetect {

/// One scored binary decision. A score of exactly 0.5 is a non-answer: the
/// system abstains on that document.
struct BinaryPredictionRecord {
  std::string id;
  int truth = 0;       // 0 human, 1 machine
  double score = 0.5;  // P(machine), in [0,1]

  bool operator==(const BinaryPredictionRecord&) const = default;
};

struct BinaryReport {
  double roc_auc = 0.0;
  double brier = 0.0;  // complement: 1 - mean squared error
  double c_at_1 = 0.0;
  double f1 = 0.0;
  double f05u = 0.0;
  double mean = 0.0;

  static BinaryReport from_metrics(double roc_auc, double brier, double c_at_1,
                                   double f1, double f05u);

  bool operator==(const BinaryReport&) const = default;
};

struct MulticlassReport {
  double macro_recall = 0.0;
  double macro_precision = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  // confusion[truth][prediction], K x K.
  std::vector<std::vector<std::size_t>> confusion;

  bool operator==(const MulticlassReport&) const = default;
};

/// Mann-Whitney formulation: over all (positive, negative) pairs, the
/// fraction with score_pos > score_neg, ties counting 0.5. Needs both
/// classes present.
double roc_auc(const std::vector<BinaryPredictionRecord>& records);

/// 1 - mean((score - truth)^2).
double brier_complement(const std::vector<BinaryPredictionRecord>& records);

/// Accuracy variant that grants each non-answer the average accuracy of the
/// answered records: (n_correct + n_unanswered * n_correct / n) / n.
double c_at_1(const std::vector<BinaryPredictionRecord>& records);

/// Standard F1 with positive class 1; answered positive means score > 0.5,
/// and non-answers count as negative predictions.
double f1_binary(const std::vector<BinaryPredictionRecord>& records);

/// F0.5 that treats positive-truth non-answers as extra false negatives:
/// 1.25*TP / (1.25*TP + 0.25*(FN + U) + FP), with TP/FP/FN over answered
/// records only and U the count of positive-truth non-answers.
double f05u(const std::vector<BinaryPredictionRecord>& records);

/// All five official binary metrics plus their arithmetic mean.
BinaryReport binary_suite(const std::vector<BinaryPredictionRecord>& records);

/// Macro recall/precision/F1 (a class with an empty denominator scores 0 and
/// stays in the average) and accuracy, plus the confusion matrix. Macro F1
/// averages per-class F1 values.
MulticlassReport multiclass_suite(const std::vector<int>& truths,
                                  const std::vector<int>& predictions, int k);

/// Maps every score within eps of 0.5 to exactly 0.5. eps 0 is the identity.
std::vector<BinaryPredictionRecord> snap_nonanswers(
    std::vector<BinaryPredictionRecord> records, double eps);

struct ScoredPrediction {
  std::string id;
  double score = 0.5;

  bool operator==(const ScoredPrediction&) const = default;
};

struct LabelPrediction {
  std::string id;
  int label = 0;

  bool operator==(const LabelPrediction&) const = default;
};

/// JSONL {"id": ..., "score": ...}, one record per line; scores must lie in
/// [0,1]. Errors carry the line number.
void save_scored_predictions(const std::vector<ScoredPrediction>& predictions,
                             const std::filesystem::path& path);
std::vector<ScoredPrediction> load_scored_predictions(
    const std::filesystem::path& path);

/// JSONL {"id": ..., "label": ...}.
void save_label_predictions(const std::vector<LabelPrediction>& predictions,
                            const std::filesystem::path& path);
std::vector<LabelPrediction> load_label_predictions(
    const std::filesystem::path& path);

/// Joins predictions to a binary truth set by id, in truth order. Ids missing
/// a prediction, predicted but absent from the truth, or predicted twice are
/// all errors naming the offenders.
std::vector<BinaryPredictionRecord> join_scored(
    const LabeledDataset& truth,
    const std::vector<ScoredPrediction>& predictions);

/// Same join for label predictions; returns (truths, predictions) aligned in
/// truth order, each label validated against the truth taxonomy.
std::pair<std::vector<int>, std::vector<int>> join_labels(
    const LabeledDataset& truth,
    const std::vector<LabelPrediction>& predictions);

}  // namespace mgtdetect
