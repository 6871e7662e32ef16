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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mgtdetect/corpus.hpp"
#include "mgtdetect/features.hpp"
#include "mgtdetect/metrics.hpp"

namespace mgtdetect {

/// Multinomial linear model: row c of weights scores class c.
class LinearClassifier {
 public:
  LinearClassifier(ClassTaxonomy taxonomy, std::size_t dimension);

  const ClassTaxonomy& taxonomy() const { return taxonomy_; }
  int k() const { return taxonomy_.size(); }
  std::size_t dimension() const { return dimension_; }

  // Row-major K x D.
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& bias() { return bias_; }
  const std::vector<double>& bias() const { return bias_; }

  double* weight_row(int c) {
    return weights_.data() + static_cast<std::size_t>(c) * dimension_;
  }
  const double* weight_row(int c) const {
    return weights_.data() + static_cast<std::size_t>(c) * dimension_;
  }

  bool operator==(const LinearClassifier&) const = default;

 private:
  ClassTaxonomy taxonomy_;
  std::size_t dimension_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

struct ClassWeights {
  std::vector<double> w;
};

/// Inverse-frequency weights w_c = N / (K * n_c); mean 1 by construction.
/// Every class must be present.
ClassWeights compute_class_weights(const std::vector<std::size_t>& counts);

/// Max-subtracted softmax; strictly positive outputs summing to 1.
std::vector<double> softmax(const std::vector<double>& logits);

/// Weight-normalized mean of per-sample cross-entropy:
/// (1/sum_i w_{y_i}) * sum_i w_{y_i} * (-ln p_i[y_i]), probabilities floored
/// at 1e-12 inside the log.
double weighted_ce_loss(const LinearClassifier& classifier,
                        const std::vector<FeatureVector>& features,
                        const std::vector<int>& labels,
                        const ClassWeights& weights);

/// Dense analytic gradient of weighted_ce_loss, used by the training step
/// and the finite-difference tests.
void weighted_ce_gradient(const LinearClassifier& classifier,
                          const std::vector<FeatureVector>& features,
                          const std::vector<int>& labels,
                          const ClassWeights& weights,
                          std::vector<double>& grad_weights,
                          std::vector<double>& grad_bias);

enum class SelectionMetric { mean_binary, macro_recall };

struct TrainConfig {
  double learning_rate = 2e-4;
  std::size_t epochs = 3;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  SelectionMetric selection_metric = SelectionMetric::mean_binary;
};

struct Checkpoint {
  std::size_t epoch = 0;  // 1-based
  LinearClassifier classifier;
  double validation_score = 0.0;
};

struct TrainResult {
  LinearClassifier best;
  std::vector<Checkpoint> history;
};

/// Mini-batch SGD from zero initialization: per epoch one seeded shuffle,
/// one gradient step per batch (no accumulation across batches), then a
/// checkpoint scored on the validation set. Returns the checkpoint with the
/// best validation score, earliest epoch on ties. Deterministic for fixed
/// inputs and config.
TrainResult train(const LabeledDataset& train_set,
                  const LabeledDataset& validation_set,
                  const FeatureSpace& space, const TrainConfig& config);

/// softmax(W x + b). The vector dimension must match the classifier.
std::vector<double> predict_proba(const LinearClassifier& classifier,
                                  const FeatureVector& vector);

/// P(class 1); requires a two-class classifier. 0.5 marks maximal
/// uncertainty, which evaluation treats as a non-answer.
double binary_score(const LinearClassifier& classifier,
                    const FeatureVector& vector);

/// Argmax of predict_proba; ties resolve to the lowest class index.
int predict_label(const LinearClassifier& classifier,
                  const FeatureVector& vector);

std::vector<ScoredPrediction> predict_scores(const LinearClassifier& classifier,
                                             const FeatureSpace& space,
                                             const LabeledDataset& dataset);
std::vector<LabelPrediction> predict_labels(const LinearClassifier& classifier,
                                            const FeatureSpace& space,
                                            const LabeledDataset& dataset);

nlohmann::ordered_json classifier_to_json(const LinearClassifier& classifier);
LinearClassifier classifier_from_json(const nlohmann::json& j);
void save_classifier(const LinearClassifier& classifier,
                     const std::filesystem::path& path);
LinearClassifier load_classifier(const std::filesystem::path& path);

}  // namespace mgtdetect
