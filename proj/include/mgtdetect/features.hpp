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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "mgtdetect/corpus.hpp"

namespace mgtdetect {

enum class TokenMode { word, char_ngram };

struct TokenizerConfig {
  TokenMode mode = TokenMode::word;
  int ngram_lo = 1;
  int ngram_hi = 1;
  bool lowercase = true;
  // Folds known confusables back to their Latin sources before tokenizing.
  // Off by default: folding would also undo a homoglyph attack, and the
  // robustness experiments need the attack to stay visible.
  bool unicode_normalize = false;

  bool operator==(const TokenizerConfig&) const = default;
};

/// Throws UsageError unless 1 <= ngram_lo <= ngram_hi <= 8.
void validate(const TokenizerConfig& config);

/// Word mode: split on Unicode whitespace, strip punctuation from chunk
/// edges, join n-grams with single spaces. Char mode: sliding windows over
/// the raw code point sequence. Lowercasing (ASCII, Latin-1, Cyrillic)
/// happens first when configured.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerConfig& config);

/// Sparse vector with strictly increasing indices; L2 norm 1 unless empty.
struct FeatureVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::size_t dimension = 0;

  bool operator==(const FeatureVector&) const = default;
};

struct TfidfModel {
  TokenizerConfig tokenizer;
  std::size_t max_features = 0;
  // Column c holds tokens[c]; tokens are sorted ascending, so columns are
  // stable under any document order.
  std::vector<std::string> tokens;
  std::unordered_map<std::string, std::uint32_t> vocabulary;
  std::vector<double> idf;

  std::size_t dimension() const { return tokens.size(); }
};

/// Selects the max_features highest-document-frequency tokens (ties broken
/// lexicographically) and computes idf_t = ln((1+N)/(1+df_t)) + 1.
TfidfModel fit_tfidf(const LabeledDataset& corpus,
                     const TokenizerConfig& tokenizer,
                     std::size_t max_features);

/// tf-idf weights (raw counts times idf), L2-normalized. Out-of-vocabulary
/// tokens are dropped; all-OOV text gives the zero vector.
FeatureVector vectorize(std::string_view text, const TfidfModel& model);

/// Stacked representation: each block is vectorized and normalized on its
/// own, the blocks are concatenated with column offsets, and the result is
/// normalized once more.
struct FeatureSpace {
  std::vector<TfidfModel> blocks;

  std::size_t dimension() const;
};

struct BlockSpec {
  TokenizerConfig tokenizer;
  std::size_t max_features = 50000;
};

/// The default representation: word 1-2 grams plus char 3-5 grams.
std::vector<BlockSpec> default_block_specs();

FeatureSpace fit_feature_space(const LabeledDataset& corpus,
                               const std::vector<BlockSpec>& specs);
FeatureVector vectorize(std::string_view text, const FeatureSpace& space);
std::vector<FeatureVector> vectorize_dataset(const LabeledDataset& dataset,
                                             const FeatureSpace& space);

nlohmann::ordered_json tokenizer_to_json(const TokenizerConfig& config);
TokenizerConfig tokenizer_from_json(const nlohmann::json& j);
nlohmann::ordered_json feature_space_to_json(const FeatureSpace& space);
FeatureSpace feature_space_from_json(const nlohmann::json& j);
void save_feature_space(const FeatureSpace& space,
                        const std::filesystem::path& path);
FeatureSpace load_feature_space(const std::filesystem::path& path);

}  // namespace mgtdetect
