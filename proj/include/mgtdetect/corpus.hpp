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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mgtdetect/common.hpp"

namespace mgtdetect {

struct Document {
  std::string id;
  std::string text;
  int label = 0;
  std::optional<std::string> genre;

  bool operator==(const Document&) const = default;
};

struct ClassInfo {
  int index = 0;
  std::string description;

  bool operator==(const ClassInfo&) const = default;
};

/// A named, contiguous 0..K-1 class scheme. Two built-ins: the two-class
/// human/machine scheme and the six-class human-AI collaboration scheme.
class ClassTaxonomy {
 public:
  ClassTaxonomy(std::string name, std::vector<ClassInfo> classes);

  static const ClassTaxonomy& binary();   // 0=human, 1=machine
  static const ClassTaxonomy& collab6();  // six collaboration classes

  const std::string& name() const { return name_; }
  int size() const { return static_cast<int>(classes_.size()); }
  const std::vector<ClassInfo>& classes() const { return classes_; }
  bool contains(int label) const { return label >= 0 && label < size(); }

  bool operator==(const ClassTaxonomy&) const = default;

 private:
  std::string name_;
  std::vector<ClassInfo> classes_;
};

ClassTaxonomy taxonomy_from_json(const nlohmann::json& j);
nlohmann::json taxonomy_to_json(const ClassTaxonomy& taxonomy);
ClassTaxonomy load_taxonomy(const std::filesystem::path& path);

/// Immutable once built; all corpus operations below return new datasets.
struct LabeledDataset {
  ClassTaxonomy taxonomy;
  std::vector<Document> documents;

  std::size_t size() const { return documents.size(); }
};

struct IngestOptions {
  bool allow_empty_text = false;
  // When false, records without a "label" field parse with label 0. Used for
  // prediction inputs, which may be unlabeled.
  bool require_label = true;
};

/// One JSON object per line with "id", "text", "label" and optional "genre";
/// unknown fields are ignored. Errors carry the 1-based line number.
LabeledDataset load_jsonl(const std::filesystem::path& path,
                          const ClassTaxonomy& taxonomy,
                          const IngestOptions& options = {});

/// Inverse of load_jsonl on (id, text, label, genre), byte-exact for UTF-8
/// text. LF line endings, atomic replace.
void save_jsonl(const LabeledDataset& dataset,
                const std::filesystem::path& path);

/// Per-class document counts, length K; classes absent from the data get 0.
std::vector<std::size_t> class_distribution(const LabeledDataset& dataset);

/// Concatenates a then b. Taxonomies must match and ids must be disjoint.
LabeledDataset merge_datasets(const LabeledDataset& a, const LabeledDataset& b);

struct SplitSpec {
  std::size_t holdout_per_class = 500;
  std::uint64_t seed = 0;
};

struct HoldoutResult {
  LabeledDataset train;
  LabeledDataset holdout;
  // One note per class that was smaller than the quota and moved whole.
  std::vector<std::string> warnings;
};

/// Moves min(quota, class size) documents per class into the holdout by
/// seeded sampling without replacement; the rest stay in train. Both outputs
/// keep the input's relative order. Deterministic for a fixed seed: one
/// SplitMix64 stream shuffles each class's positions in ascending class
/// order, and the first min(quota, n_c) shuffled positions go to the holdout.
HoldoutResult balanced_holdout(const LabeledDataset& dataset,
                               const SplitSpec& spec);

struct SplitResult {
  LabeledDataset part1;
  LabeledDataset part2;
};

/// Per class, round_half_up(fraction * n_c) documents go to part1, sampled
/// with the same seeded scheme as balanced_holdout. 0 < fraction < 1.
SplitResult stratified_split(const LabeledDataset& dataset, double fraction,
                             std::uint64_t seed);

}  // namespace mgtdetect
