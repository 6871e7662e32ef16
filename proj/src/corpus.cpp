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

#include "mgtdetect/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "mgtdetect/io.hpp"
#include "mgtdetect/rng.hpp"

namespace mgtdetect {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ClassTaxonomy::ClassTaxonomy(std::string name, std::vector<ClassInfo> classes)
    : name_(std::move(name)), classes_(std::move(classes)) {
  if (classes_.empty()) {
    throw DataError("taxonomy '" + name_ + "' has no classes");
  }
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].index != static_cast<int>(i)) {
      throw DataError("taxonomy '" + name_ +
                      "' class indices must be contiguous from 0; got " +
                      std::to_string(classes_[i].index) + " at position " +
                      std::to_string(i));
    }
  }
}

const ClassTaxonomy& ClassTaxonomy::binary() {
  static const ClassTaxonomy t("binary", {
                                             {0, "human"},
                                             {1, "machine"},
                                         });
  return t;
}

const ClassTaxonomy& ClassTaxonomy::collab6() {
  static const ClassTaxonomy t(
      "collab6", {
                     {0, "fully human-written"},
                     {1, "human-written, then machine-polished"},
                     {2, "machine-written, then machine-humanized"},
                     {3, "human-initiated, then machine-continued"},
                     {4, "deeply-mixed text"},
                     {5, "machine-written, then human-edited"},
                 });
  return t;
}

ClassTaxonomy taxonomy_from_json(const json& j) {
  if (!j.is_object() || !j.contains("name") || !j.contains("classes")) {
    throw DataError("taxonomy JSON must have \"name\" and \"classes\"");
  }
  std::vector<ClassInfo> classes;
  for (const auto& c : j.at("classes")) {
    classes.push_back(
        {c.at("index").get<int>(), c.at("description").get<std::string>()});
  }
  return ClassTaxonomy(j.at("name").get<std::string>(), std::move(classes));
}

json taxonomy_to_json(const ClassTaxonomy& taxonomy) {
  json classes = json::array();
  for (const auto& c : taxonomy.classes()) {
    classes.push_back({{"index", c.index}, {"description", c.description}});
  }
  return {{"name", taxonomy.name()}, {"classes", classes}};
}

ClassTaxonomy load_taxonomy(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": invalid taxonomy JSON: " + e.what());
  }
  return taxonomy_from_json(j);
}

LabeledDataset load_jsonl(const fs::path& path, const ClassTaxonomy& taxonomy,
                          const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());

  LabeledDataset dataset{taxonomy, {}};
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  const std::string where = path.string() + ":";

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + std::to_string(line_no) +
                      ": malformed JSON line: " + e.what());
    }
    if (!j.is_object()) {
      throw DataError(where + std::to_string(line_no) +
                      ": expected a JSON object");
    }

    Document doc;
    if (!j.contains("id") || !j.at("id").is_string()) {
      throw DataError(where + std::to_string(line_no) +
                      ": missing or non-string \"id\"");
    }
    doc.id = j.at("id").get<std::string>();
    if (doc.id.empty()) {
      throw DataError(where + std::to_string(line_no) + ": empty \"id\"");
    }
    if (!seen_ids.insert(doc.id).second) {
      throw DataError(where + std::to_string(line_no) + ": duplicate id \"" +
                      doc.id + "\"");
    }

    if (!j.contains("text") || !j.at("text").is_string()) {
      throw DataError(where + std::to_string(line_no) +
                      ": missing or non-string \"text\"");
    }
    doc.text = j.at("text").get<std::string>();
    if (doc.text.empty() && !options.allow_empty_text) {
      throw DataError(where + std::to_string(line_no) + ": empty \"text\" (id \"" +
                      doc.id + "\"); pass allow_empty_text to accept");
    }

    if (j.contains("label")) {
      if (!j.at("label").is_number_integer()) {
        throw DataError(where + std::to_string(line_no) +
                        ": \"label\" must be an integer");
      }
      doc.label = j.at("label").get<int>();
      if (!taxonomy.contains(doc.label)) {
        throw DataError(where + std::to_string(line_no) +
                        ": label out of range: " + std::to_string(doc.label) +
                        " not in 0.." + std::to_string(taxonomy.size() - 1) +
                        " (taxonomy '" + taxonomy.name() + "')");
      }
    } else if (options.require_label) {
      throw DataError(where + std::to_string(line_no) + ": missing \"label\"");
    }

    if (j.contains("genre")) {
      if (!j.at("genre").is_string()) {
        throw DataError(where + std::to_string(line_no) +
                        ": \"genre\" must be a string");
      }
      doc.genre = j.at("genre").get<std::string>();
    }

    dataset.documents.push_back(std::move(doc));
  }
  if (in.bad()) throw DataError("read failure: " + path.string());
  return dataset;
}

void save_jsonl(const LabeledDataset& dataset, const fs::path& path) {
  std::string out;
  for (const auto& doc : dataset.documents) {
    ordered_json j;
    j["id"] = doc.id;
    j["text"] = doc.text;
    j["label"] = doc.label;
    if (doc.genre) j["genre"] = *doc.genre;
    out += j.dump();
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<std::size_t> class_distribution(const LabeledDataset& dataset) {
  std::vector<std::size_t> counts(dataset.taxonomy.size(), 0);
  for (const auto& doc : dataset.documents) {
    counts[static_cast<std::size_t>(doc.label)]++;
  }
  return counts;
}

LabeledDataset merge_datasets(const LabeledDataset& a,
                              const LabeledDataset& b) {
  if (!(a.taxonomy == b.taxonomy)) {
    throw DataError("cannot merge datasets with different taxonomies: '" +
                    a.taxonomy.name() + "' vs '" + b.taxonomy.name() + "'");
  }
  std::unordered_set<std::string> ids;
  ids.reserve(a.size());
  for (const auto& doc : a.documents) ids.insert(doc.id);
  for (const auto& doc : b.documents) {
    if (ids.count(doc.id)) {
      throw DataError("id collision on merge: \"" + doc.id + "\"");
    }
  }
  LabeledDataset merged{a.taxonomy, a.documents};
  merged.documents.insert(merged.documents.end(), b.documents.begin(),
                          b.documents.end());
  return merged;
}

namespace {

// Positions of each class's documents, then a seeded shuffle per class in
// ascending class order off one stream. Shared by both split operations.
std::vector<std::vector<std::size_t>> shuffled_positions_by_class(
    const LabeledDataset& dataset, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(dataset.taxonomy.size());
  for (std::size_t i = 0; i < dataset.documents.size(); ++i) {
    by_class[static_cast<std::size_t>(dataset.documents[i].label)].push_back(i);
  }
  SplitMix64 rng(seed);
  for (auto& positions : by_class) shuffle(positions, rng);
  return by_class;
}

// Splits the dataset into (selected, rest) from per-class take counts; both
// halves keep the input's relative order.
std::pair<LabeledDataset, LabeledDataset> take_per_class(
    const LabeledDataset& dataset,
    const std::vector<std::vector<std::size_t>>& by_class,
    const std::vector<std::size_t>& take) {
  std::vector<char> selected(dataset.size(), 0);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    for (std::size_t k = 0; k < take[c]; ++k) {
      selected[by_class[c][k]] = 1;
    }
  }
  LabeledDataset picked{dataset.taxonomy, {}};
  LabeledDataset rest{dataset.taxonomy, {}};
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (selected[i] ? picked : rest).documents.push_back(dataset.documents[i]);
  }
  return {std::move(picked), std::move(rest)};
}

}  // namespace

HoldoutResult balanced_holdout(const LabeledDataset& dataset,
                               const SplitSpec& spec) {
  if (spec.holdout_per_class < 1) {
    throw UsageError("holdout_per_class must be at least 1");
  }
  const auto by_class = shuffled_positions_by_class(dataset, spec.seed);

  std::vector<std::string> warnings;
  std::vector<std::size_t> take(by_class.size());
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    take[c] = std::min(spec.holdout_per_class, by_class[c].size());
    if (by_class[c].size() < spec.holdout_per_class) {
      warnings.push_back(
          "class " + std::to_string(c) + " has " +
          std::to_string(by_class[c].size()) + " documents, below the quota of " +
          std::to_string(spec.holdout_per_class) + "; all moved to holdout");
    }
  }
  auto [holdout, train] = take_per_class(dataset, by_class, take);
  return HoldoutResult{std::move(train), std::move(holdout),
                       std::move(warnings)};
}

SplitResult stratified_split(const LabeledDataset& dataset, double fraction,
                             std::uint64_t seed) {
  if (!(fraction > 0.0) || !(fraction < 1.0)) {
    throw UsageError("split fraction must be in (0, 1)");
  }
  const auto by_class = shuffled_positions_by_class(dataset, seed);
  std::vector<std::size_t> take(by_class.size());
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    take[c] = std::min(by_class[c].size(),
                       round_half_up(fraction *
                                     static_cast<double>(by_class[c].size())));
  }
  auto [part1, part2] = take_per_class(dataset, by_class, take);
  return {std::move(part1), std::move(part2)};
}

}  // namespace mgtdetect
