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

#include "mgtdetect/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "mgtdetect/io.hpp"
#include "mgtdetect/kernels.hpp"

namespace mgtdetect {

namespace {

void validate_records(const std::vector<BinaryPredictionRecord>& records,
                      const char* op) {
  if (records.empty()) {
    throw DataError(std::string(op) + ": no records");
  }
  for (const auto& r : records) {
    if (r.truth != 0 && r.truth != 1) {
      throw DataError(std::string(op) + ": truth for \"" + r.id +
                      "\" must be 0 or 1");
    }
    if (!(r.score >= 0.0 && r.score <= 1.0)) {
      throw DataError(std::string(op) + ": score for \"" + r.id +
                      "\" outside [0, 1]");
    }
  }
}

bool answered(const BinaryPredictionRecord& r) { return r.score != 0.5; }
bool predicted_positive(const BinaryPredictionRecord& r) {
  return r.score > 0.5;
}

// Lists up to ten offenders, then "and N more".
std::string summarize_ids(const std::vector<std::string>& ids) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) out += ", ";
    out += "\"" + ids[i] + "\"";
  }
  if (ids.size() > shown) {
    out += " and " + std::to_string(ids.size() - shown) + " more";
  }
  return out;
}

}  // namespace

BinaryReport BinaryReport::from_metrics(double roc_auc, double brier,
                                        double c_at_1, double f1,
                                        double f05u) {
  BinaryReport report;
  report.roc_auc = roc_auc;
  report.brier = brier;
  report.c_at_1 = c_at_1;
  report.f1 = f1;
  report.f05u = f05u;
  report.mean = (roc_auc + brier + c_at_1 + f1 + f05u) / 5.0;
  return report;
}

double roc_auc(const std::vector<BinaryPredictionRecord>& records) {
  validate_records(records, "roc_auc");
  std::size_t positives = 0;
  for (const auto& r : records) positives += static_cast<std::size_t>(r.truth);
  const std::size_t negatives = records.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw DataError(
        "roc_auc: undefined with a single class; need at least one positive "
        "and one negative record");
  }

  // Midrank Mann-Whitney: AUC = (R_pos - n_pos(n_pos+1)/2) / (n_pos * n_neg)
  // where R_pos sums the average ranks of the positive scores.
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].score < records[b].score;
  });

  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() &&
           records[order[j]].score == records[order[i]].score) {
      ++j;
    }
    // Ranks are 1-based; the tied block [i, j) shares the average rank.
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (records[order[k]].truth == 1) positive_rank_sum += midrank;
    }
    i = j;
  }
  const double np = static_cast<double>(positives);
  const double nn = static_cast<double>(negatives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double brier_complement(const std::vector<BinaryPredictionRecord>& records) {
  validate_records(records, "brier_complement");
  std::vector<double> scores, truths;
  scores.reserve(records.size());
  truths.reserve(records.size());
  for (const auto& r : records) {
    scores.push_back(r.score);
    truths.push_back(static_cast<double>(r.truth));
  }
  const double sum = kernels::active().squared_error_sum(
      scores.data(), truths.data(), scores.size());
  return 1.0 - sum / static_cast<double>(records.size());
}

double c_at_1(const std::vector<BinaryPredictionRecord>& records) {
  validate_records(records, "c_at_1");
  const double n = static_cast<double>(records.size());
  double unanswered = 0.0, correct = 0.0;
  for (const auto& r : records) {
    if (!answered(r)) {
      unanswered += 1.0;
    } else if (predicted_positive(r) == (r.truth == 1)) {
      correct += 1.0;
    }
  }
  return (correct + unanswered * correct / n) / n;
}

double f1_binary(const std::vector<BinaryPredictionRecord>& records) {
  validate_records(records, "f1_binary");
  double tp = 0.0, fp = 0.0, fn = 0.0;
  for (const auto& r : records) {
    // A non-answer never predicts positive, so it lands in FN when the truth
    // is positive.
    if (predicted_positive(r)) {
      (r.truth == 1 ? tp : fp) += 1.0;
    } else if (r.truth == 1) {
      fn += 1.0;
    }
  }
  const double denominator = 2.0 * tp + fp + fn;
  return denominator == 0.0 ? 0.0 : 2.0 * tp / denominator;
}

double f05u(const std::vector<BinaryPredictionRecord>& records) {
  validate_records(records, "f05u");
  double tp = 0.0, fp = 0.0, fn = 0.0, u = 0.0;
  for (const auto& r : records) {
    if (!answered(r)) {
      if (r.truth == 1) u += 1.0;
      continue;
    }
    if (predicted_positive(r)) {
      (r.truth == 1 ? tp : fp) += 1.0;
    } else if (r.truth == 1) {
      fn += 1.0;
    }
  }
  const double denominator = 1.25 * tp + 0.25 * (fn + u) + fp;
  return denominator == 0.0 ? 0.0 : 1.25 * tp / denominator;
}

BinaryReport binary_suite(const std::vector<BinaryPredictionRecord>& records) {
  return BinaryReport::from_metrics(roc_auc(records),
                                    brier_complement(records),
                                    c_at_1(records), f1_binary(records),
                                    f05u(records));
}

MulticlassReport multiclass_suite(const std::vector<int>& truths,
                                  const std::vector<int>& predictions,
                                  int k) {
  if (truths.size() != predictions.size()) {
    throw DataError("multiclass_suite: " + std::to_string(truths.size()) +
                    " truths vs " + std::to_string(predictions.size()) +
                    " predictions");
  }
  if (truths.empty()) throw DataError("multiclass_suite: no records");
  if (k < 2) throw DataError("multiclass_suite: need at least 2 classes");

  MulticlassReport report;
  report.confusion.assign(static_cast<std::size_t>(k),
                          std::vector<std::size_t>(static_cast<std::size_t>(k), 0));
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] < 0 || truths[i] >= k || predictions[i] < 0 ||
        predictions[i] >= k) {
      throw DataError("multiclass_suite: class index out of range at record " +
                      std::to_string(i));
    }
    report.confusion[static_cast<std::size_t>(truths[i])]
                    [static_cast<std::size_t>(predictions[i])]++;
  }

  double recall_sum = 0.0, precision_sum = 0.0, f1_sum = 0.0, diagonal = 0.0;
  for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
    double tp = static_cast<double>(report.confusion[c][c]);
    double truth_total = 0.0, predicted_total = 0.0;
    for (std::size_t other = 0; other < static_cast<std::size_t>(k); ++other) {
      truth_total += static_cast<double>(report.confusion[c][other]);
      predicted_total += static_cast<double>(report.confusion[other][c]);
    }
    const double recall = truth_total == 0.0 ? 0.0 : tp / truth_total;
    const double precision = predicted_total == 0.0 ? 0.0 : tp / predicted_total;
    const double f1 = (precision + recall) == 0.0
                          ? 0.0
                          : 2.0 * precision * recall / (precision + recall);
    recall_sum += recall;
    precision_sum += precision;
    f1_sum += f1;
    diagonal += tp;
  }
  report.macro_recall = recall_sum / static_cast<double>(k);
  report.macro_precision = precision_sum / static_cast<double>(k);
  report.macro_f1 = f1_sum / static_cast<double>(k);
  report.accuracy = diagonal / static_cast<double>(truths.size());
  return report;
}

std::vector<BinaryPredictionRecord> snap_nonanswers(
    std::vector<BinaryPredictionRecord> records, double eps) {
  if (eps < 0.0) throw UsageError("snap epsilon must be non-negative");
  for (auto& r : records) {
    if (std::abs(r.score - 0.5) <= eps) r.score = 0.5;
  }
  return records;
}

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Shared JSONL scaffolding for the two prediction formats.
template <typename Record, typename ParseField>
std::vector<Record> load_prediction_jsonl(const std::filesystem::path& path,
                                          const char* field,
                                          ParseField parse_field) {
  std::vector<Record> records;
  std::unordered_set<std::string> seen;
  const std::string text = read_file(path);
  std::size_t line_no = 0;
  std::size_t start = 0;
  const std::string where = path.string() + ":";
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + std::to_string(line_no) +
                      ": malformed JSON line: " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.at("id").is_string()) {
      throw DataError(where + std::to_string(line_no) +
                      ": missing or non-string \"id\"");
    }
    Record record;
    record.id = j.at("id").get<std::string>();
    if (record.id.empty()) {
      throw DataError(where + std::to_string(line_no) + ": empty \"id\"");
    }
    if (!seen.insert(record.id).second) {
      throw DataError(where + std::to_string(line_no) + ": duplicate id \"" +
                      record.id + "\"");
    }
    if (!j.contains(field)) {
      throw DataError(where + std::to_string(line_no) + ": missing \"" +
                      field + "\"");
    }
    parse_field(j.at(field), record, where + std::to_string(line_no));
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace

void save_scored_predictions(const std::vector<ScoredPrediction>& predictions,
                             const std::filesystem::path& path) {
  std::string out;
  for (const auto& p : predictions) {
    ordered_json j;
    j["id"] = p.id;
    j["score"] = p.score;
    out += j.dump();
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<ScoredPrediction> load_scored_predictions(
    const std::filesystem::path& path) {
  return load_prediction_jsonl<ScoredPrediction>(
      path, "score",
      [](const json& value, ScoredPrediction& record, const std::string& at) {
        if (!value.is_number()) {
          throw DataError(at + ": \"score\" must be a number");
        }
        record.score = value.get<double>();
        if (!(record.score >= 0.0 && record.score <= 1.0)) {
          throw DataError(at + ": score outside [0, 1]");
        }
      });
}

void save_label_predictions(const std::vector<LabelPrediction>& predictions,
                            const std::filesystem::path& path) {
  std::string out;
  for (const auto& p : predictions) {
    ordered_json j;
    j["id"] = p.id;
    j["label"] = p.label;
    out += j.dump();
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<LabelPrediction> load_label_predictions(
    const std::filesystem::path& path) {
  return load_prediction_jsonl<LabelPrediction>(
      path, "label",
      [](const json& value, LabelPrediction& record, const std::string& at) {
        if (!value.is_number_integer()) {
          throw DataError(at + ": \"label\" must be an integer");
        }
        record.label = value.get<int>();
      });
}

namespace {

// Checks the prediction ids against the truth ids; returns prediction lookup.
template <typename Prediction>
std::unordered_map<std::string, const Prediction*> join_ids(
    const LabeledDataset& truth, const std::vector<Prediction>& predictions) {
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second) {
      throw DataError("duplicate prediction for id \"" + p.id + "\"");
    }
  }
  std::vector<std::string> missing;
  std::unordered_set<std::string> truth_ids;
  for (const auto& doc : truth.documents) {
    truth_ids.insert(doc.id);
    if (by_id.count(doc.id) == 0) missing.push_back(doc.id);
  }
  std::vector<std::string> extra;
  for (const auto& p : predictions) {
    if (truth_ids.count(p.id) == 0) extra.push_back(p.id);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string message = "prediction/truth id mismatch:";
    if (!missing.empty()) {
      message += " missing predictions for " + summarize_ids(missing) + ";";
    }
    if (!extra.empty()) {
      message += " predictions without truth for " + summarize_ids(extra) + ";";
    }
    message.pop_back();
    throw DataError(message);
  }
  return by_id;
}

}  // namespace

std::vector<BinaryPredictionRecord> join_scored(
    const LabeledDataset& truth,
    const std::vector<ScoredPrediction>& predictions) {
  const auto by_id = join_ids(truth, predictions);
  std::vector<BinaryPredictionRecord> records;
  records.reserve(truth.size());
  for (const auto& doc : truth.documents) {
    if (doc.label != 0 && doc.label != 1) {
      throw DataError("binary evaluation needs 0/1 truth labels; id \"" +
                      doc.id + "\" has label " + std::to_string(doc.label));
    }
    records.push_back(
        BinaryPredictionRecord{doc.id, doc.label, by_id.at(doc.id)->score});
  }
  return records;
}

std::pair<std::vector<int>, std::vector<int>> join_labels(
    const LabeledDataset& truth,
    const std::vector<LabelPrediction>& predictions) {
  const auto by_id = join_ids(truth, predictions);
  std::vector<int> truths, predicted;
  truths.reserve(truth.size());
  predicted.reserve(truth.size());
  for (const auto& doc : truth.documents) {
    const int label = by_id.at(doc.id)->label;
    if (!truth.taxonomy.contains(label)) {
      throw DataError("predicted label " + std::to_string(label) +
                      " for id \"" + doc.id + "\" is outside taxonomy '" +
                      truth.taxonomy.name() + "'");
    }
    truths.push_back(doc.label);
    predicted.push_back(label);
  }
  return {std::move(truths), std::move(predicted)};
}

}  // namespace mgtdetect
