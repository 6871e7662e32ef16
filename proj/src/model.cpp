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

#include "mgtdetect/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mgtdetect/io.hpp"
#include "mgtdetect/kernels.hpp"
#include "mgtdetect/rng.hpp"

namespace mgtdetect {

namespace {

constexpr double kProbabilityFloor = 1e-12;

void check_dimension(const LinearClassifier& classifier,
                     const FeatureVector& vector) {
  if (vector.dimension != classifier.dimension()) {
    throw DataError("feature dimension " + std::to_string(vector.dimension) +
                    " does not match classifier dimension " +
                    std::to_string(classifier.dimension()));
  }
}

std::vector<double> logits_for(const LinearClassifier& classifier,
                               const FeatureVector& vector) {
  const auto& k = kernels::active();
  std::vector<double> logits(static_cast<std::size_t>(classifier.k()));
  for (int c = 0; c < classifier.k(); ++c) {
    logits[static_cast<std::size_t>(c)] =
        k.gather_dot(vector.values.data(), vector.indices.data(),
                     vector.indices.size(), classifier.weight_row(c)) +
        classifier.bias()[static_cast<std::size_t>(c)];
  }
  return logits;
}

void validate_batch(const LinearClassifier& classifier,
                    const std::vector<FeatureVector>& features,
                    const std::vector<int>& labels,
                    const ClassWeights& weights) {
  if (features.empty() || features.size() != labels.size()) {
    throw DataError("batch must be non-empty with one label per vector");
  }
  if (weights.w.size() != static_cast<std::size_t>(classifier.k())) {
    throw DataError("class weight vector length does not match K");
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    check_dimension(classifier, features[i]);
    if (!classifier.taxonomy().contains(labels[i])) {
      throw DataError("label " + std::to_string(labels[i]) +
                      " outside taxonomy at batch position " +
                      std::to_string(i));
    }
  }
}

}  // namespace

LinearClassifier::LinearClassifier(ClassTaxonomy taxonomy,
                                   std::size_t dimension)
    : taxonomy_(std::move(taxonomy)),
      dimension_(dimension),
      weights_(static_cast<std::size_t>(taxonomy_.size()) * dimension, 0.0),
      bias_(static_cast<std::size_t>(taxonomy_.size()), 0.0) {}

ClassWeights compute_class_weights(const std::vector<std::size_t>& counts) {
  if (counts.size() < 2) {
    throw DataError("class weights need at least 2 classes");
  }
  std::size_t total = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw DataError("cannot weight class " + std::to_string(c) +
                      ": no documents of that class in the training data");
    }
    total += counts[c];
  }
  ClassWeights weights;
  const double n = static_cast<double>(total);
  const double k = static_cast<double>(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    weights.w.push_back(n / (k * static_cast<double>(counts[c])));
  }
  return weights;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    out[c] = std::exp(logits[c] - peak);
    sum += out[c];
  }
  for (double& p : out) p /= sum;
  return out;
}

double weighted_ce_loss(const LinearClassifier& classifier,
                        const std::vector<FeatureVector>& features,
                        const std::vector<int>& labels,
                        const ClassWeights& weights) {
  validate_batch(classifier, features, labels, weights);
  double weight_sum = 0.0, loss_sum = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto p = softmax(logits_for(classifier, features[i]));
    const double w = weights.w[static_cast<std::size_t>(labels[i])];
    const double py = std::max(p[static_cast<std::size_t>(labels[i])],
                               kProbabilityFloor);
    weight_sum += w;
    loss_sum += w * -std::log(py);
  }
  return loss_sum / weight_sum;
}

void weighted_ce_gradient(const LinearClassifier& classifier,
                          const std::vector<FeatureVector>& features,
                          const std::vector<int>& labels,
                          const ClassWeights& weights,
                          std::vector<double>& grad_weights,
                          std::vector<double>& grad_bias) {
  validate_batch(classifier, features, labels, weights);
  const auto k = static_cast<std::size_t>(classifier.k());
  const std::size_t d = classifier.dimension();
  grad_weights.assign(k * d, 0.0);
  grad_bias.assign(k, 0.0);

  double weight_sum = 0.0;
  for (int label : labels) {
    weight_sum += weights.w[static_cast<std::size_t>(label)];
  }

  const auto& ops = kernels::active();
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto p = softmax(logits_for(classifier, features[i]));
    const double scale =
        weights.w[static_cast<std::size_t>(labels[i])] / weight_sum;
    for (std::size_t c = 0; c < k; ++c) {
      const double coefficient =
          scale * (p[c] - (static_cast<int>(c) == labels[i] ? 1.0 : 0.0));
      ops.scatter_axpy(coefficient, features[i].values.data(),
                       features[i].indices.data(), features[i].indices.size(),
                       grad_weights.data() + c * d);
      grad_bias[c] += coefficient;
    }
  }
}

namespace {

double score_checkpoint(const LinearClassifier& classifier,
                        const std::vector<FeatureVector>& features,
                        const LabeledDataset& validation,
                        SelectionMetric metric) {
  if (metric == SelectionMetric::mean_binary) {
    std::vector<BinaryPredictionRecord> records;
    records.reserve(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
      records.push_back(BinaryPredictionRecord{
          validation.documents[i].id, validation.documents[i].label,
          binary_score(classifier, features[i])});
    }
    return binary_suite(records).mean;
  }
  std::vector<int> truths, predictions;
  truths.reserve(features.size());
  predictions.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    truths.push_back(validation.documents[i].label);
    predictions.push_back(predict_label(classifier, features[i]));
  }
  return multiclass_suite(truths, predictions, classifier.k()).macro_recall;
}

}  // namespace

TrainResult train(const LabeledDataset& train_set,
                  const LabeledDataset& validation_set,
                  const FeatureSpace& space, const TrainConfig& config) {
  if (!(train_set.taxonomy == validation_set.taxonomy)) {
    throw DataError("train and validation sets use different taxonomies");
  }
  if (train_set.documents.empty()) throw DataError("training set is empty");
  if (validation_set.documents.empty()) {
    throw DataError("validation set is empty");
  }
  if (!(config.learning_rate > 0.0)) {
    throw UsageError("learning_rate must be positive");
  }
  if (config.epochs < 1) throw UsageError("epochs must be at least 1");
  if (config.batch_size < 1) throw UsageError("batch_size must be at least 1");
  if (config.selection_metric == SelectionMetric::mean_binary &&
      train_set.taxonomy.size() != 2) {
    throw UsageError(
        "selection metric mean_binary needs a two-class taxonomy; use "
        "macro_recall");
  }

  const auto counts = class_distribution(train_set);
  const ClassWeights class_weights = compute_class_weights(counts);

  const auto train_features = vectorize_dataset(train_set, space);
  const auto validation_features = vectorize_dataset(validation_set, space);

  const auto k = static_cast<std::size_t>(train_set.taxonomy.size());
  const std::size_t d = space.dimension();
  LinearClassifier classifier(train_set.taxonomy, d);

  const auto& ops = kernels::active();
  SplitMix64 rng(config.seed);
  std::vector<std::size_t> order(train_features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{classifier, {}};
  // Per-sample softmax coefficients for one batch, all computed against the
  // pre-batch parameters before any update is applied.
  std::vector<double> coefficients;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t begin = 0; begin < order.size();
         begin += config.batch_size) {
      const std::size_t end =
          std::min(begin + config.batch_size, order.size());

      double weight_sum = 0.0;
      for (std::size_t b = begin; b < end; ++b) {
        weight_sum += class_weights.w[static_cast<std::size_t>(
            train_set.documents[order[b]].label)];
      }

      coefficients.assign((end - begin) * k, 0.0);
      for (std::size_t b = begin; b < end; ++b) {
        const std::size_t sample = order[b];
        const int label = train_set.documents[sample].label;
        const auto p = softmax(logits_for(classifier, train_features[sample]));
        const double scale =
            class_weights.w[static_cast<std::size_t>(label)] / weight_sum;
        for (std::size_t c = 0; c < k; ++c) {
          coefficients[(b - begin) * k + c] =
              scale *
              (p[c] - (static_cast<int>(c) == label ? 1.0 : 0.0));
        }
      }

      for (std::size_t b = begin; b < end; ++b) {
        const auto& x = train_features[order[b]];
        for (std::size_t c = 0; c < k; ++c) {
          const double step =
              -config.learning_rate * coefficients[(b - begin) * k + c];
          if (step == 0.0) continue;
          ops.scatter_axpy(step, x.values.data(), x.indices.data(),
                           x.indices.size(),
                           classifier.weight_row(static_cast<int>(c)));
          classifier.bias()[c] += step;
        }
      }
    }

    const double score = score_checkpoint(classifier, validation_features,
                                          validation_set,
                                          config.selection_metric);
    result.history.push_back(Checkpoint{epoch, classifier, score});
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.history.size(); ++i) {
    if (result.history[i].validation_score >
        result.history[best].validation_score) {
      best = i;
    }
  }
  result.best = result.history[best].classifier;
  return result;
}

std::vector<double> predict_proba(const LinearClassifier& classifier,
                                  const FeatureVector& vector) {
  check_dimension(classifier, vector);
  return softmax(logits_for(classifier, vector));
}

double binary_score(const LinearClassifier& classifier,
                    const FeatureVector& vector) {
  if (classifier.k() != 2) {
    throw DataError("binary_score needs a two-class classifier; got K = " +
                    std::to_string(classifier.k()));
  }
  return predict_proba(classifier, vector)[1];
}

int predict_label(const LinearClassifier& classifier,
                  const FeatureVector& vector) {
  const auto p = predict_proba(classifier, vector);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::vector<ScoredPrediction> predict_scores(const LinearClassifier& classifier,
                                             const FeatureSpace& space,
                                             const LabeledDataset& dataset) {
  std::vector<ScoredPrediction> out;
  out.reserve(dataset.size());
  for (const auto& doc : dataset.documents) {
    out.push_back(ScoredPrediction{
        doc.id, binary_score(classifier, vectorize(doc.text, space))});
  }
  return out;
}

std::vector<LabelPrediction> predict_labels(const LinearClassifier& classifier,
                                            const FeatureSpace& space,
                                            const LabeledDataset& dataset) {
  std::vector<LabelPrediction> out;
  out.reserve(dataset.size());
  for (const auto& doc : dataset.documents) {
    out.push_back(LabelPrediction{
        doc.id, predict_label(classifier, vectorize(doc.text, space))});
  }
  return out;
}

namespace {
constexpr int kClassifierVersion = 1;
}

nlohmann::ordered_json classifier_to_json(const LinearClassifier& classifier) {
  nlohmann::ordered_json j;
  j["version"] = kClassifierVersion;
  j["taxonomy"] = taxonomy_to_json(classifier.taxonomy());
  j["dimension"] = classifier.dimension();
  j["k"] = classifier.k();
  j["weights"] = classifier.weights();
  j["bias"] = classifier.bias();
  return j;
}

LinearClassifier classifier_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version")) {
    throw DataError("classifier JSON needs a \"version\"");
  }
  if (j.at("version").get<int>() != kClassifierVersion) {
    throw DataError("unsupported classifier version " + j.at("version").dump());
  }
  auto taxonomy = taxonomy_from_json(j.at("taxonomy"));
  const auto dimension = j.at("dimension").get<std::size_t>();
  const int k = j.at("k").get<int>();
  if (k != taxonomy.size()) {
    throw DataError("classifier K does not match its taxonomy");
  }
  LinearClassifier classifier(std::move(taxonomy), dimension);
  auto weights = j.at("weights").get<std::vector<double>>();
  auto bias = j.at("bias").get<std::vector<double>>();
  if (weights.size() != static_cast<std::size_t>(k) * dimension ||
      bias.size() != static_cast<std::size_t>(k)) {
    throw DataError("classifier parameter shapes do not match K x D");
  }
  for (double value : weights) {
    if (!std::isfinite(value)) {
      throw DataError("classifier weights must be finite");
    }
  }
  for (double value : bias) {
    if (!std::isfinite(value)) {
      throw DataError("classifier bias must be finite");
    }
  }
  classifier.weights() = std::move(weights);
  classifier.bias() = std::move(bias);
  return classifier;
}

void save_classifier(const LinearClassifier& classifier,
                     const std::filesystem::path& path) {
  atomic_write_file(path, classifier_to_json(classifier).dump() + "\n");
}

LinearClassifier load_classifier(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": invalid classifier JSON: " + e.what());
  }
  try {
    return classifier_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": invalid classifier JSON: " + e.what());
  }
}

}  // namespace mgtdetect
