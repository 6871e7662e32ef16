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

#include "mgtdetect/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>
#include <utility>

#include "mgtdetect/io.hpp"
#include "mgtdetect/kernels.hpp"
#include "mgtdetect/obfusc.hpp"
#include "mgtdetect/utf8.hpp"

namespace mgtdetect {

void validate(const TokenizerConfig& config) {
  if (config.ngram_lo < 1 || config.ngram_lo > config.ngram_hi ||
      config.ngram_hi > 8) {
    throw UsageError("ngram range must satisfy 1 <= low <= high <= 8; got " +
                     std::to_string(config.ngram_lo) + ".." +
                     std::to_string(config.ngram_hi));
  }
}

namespace {

bool is_space(char32_t c) {
  switch (c) {
    case U'\t': case U'\n': case U'\v': case U'\f': case U'\r': case U' ':
    case 0x0085: case 0x00A0: case 0x1680: case 0x2000: case 0x2001:
    case 0x2002: case 0x2003: case 0x2004: case 0x2005: case 0x2006:
    case 0x2007: case 0x2008: case 0x2009: case 0x200A: case 0x2028:
    case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return false;
  }
}

bool is_strippable_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= U'!' && c <= U'/') || (c >= U':' && c <= U'@') ||
           (c >= U'[' && c <= U'`') || (c >= U'{' && c <= U'~');
  }
  switch (c) {
    case 0x00A1:  // inverted exclamation
    case 0x00B7:  // middle dot
    case 0x00BF:  // inverted question
    case 0x00AB: case 0x00BB:  // guillemets
    case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014:
    case 0x2018: case 0x2019: case 0x201A: case 0x201C: case 0x201D:
    case 0x201E: case 0x2022: case 0x2026: case 0x2032: case 0x2033:
    case 0x2039: case 0x203A:
      return true;
    default:
      return false;
  }
}

char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  // Latin-1 uppercase, skipping the multiplication sign.
  if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 0x20;
  // Cyrillic А..Я and Ѐ..Џ.
  if (c >= 0x0410 && c <= 0x042F) return c + 0x20;
  if (c >= 0x0400 && c <= 0x040F) return c + 0x50;
  return c;
}

std::vector<std::u32string> split_words(const std::u32string& text) {
  std::vector<std::u32string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i == start) continue;
    std::size_t lo = start, hi = i;
    while (lo < hi && is_strippable_punct(text[lo])) ++lo;
    while (hi > lo && is_strippable_punct(text[hi - 1])) --hi;
    if (hi > lo) words.push_back(text.substr(lo, hi - lo));
  }
  return words;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerConfig& config) {
  validate(config);
  std::string folded;
  if (config.unicode_normalize) {
    folded = restore_text(text, default_homoglyph_map());
    text = folded;
  }
  std::u32string decoded = decode_utf8(text);
  if (config.lowercase) {
    for (char32_t& c : decoded) c = to_lower(c);
  }

  std::vector<std::string> tokens;
  if (config.mode == TokenMode::word) {
    const auto words = split_words(decoded);
    for (int n = config.ngram_lo; n <= config.ngram_hi; ++n) {
      if (words.size() < static_cast<std::size_t>(n)) break;
      for (std::size_t i = 0; i + n <= words.size(); ++i) {
        std::u32string joined = words[i];
        for (int k = 1; k < n; ++k) {
          joined += U' ';
          joined += words[i + k];
        }
        tokens.push_back(encode_utf8(joined));
      }
    }
  } else {
    for (int n = config.ngram_lo; n <= config.ngram_hi; ++n) {
      if (decoded.size() < static_cast<std::size_t>(n)) break;
      for (std::size_t i = 0; i + n <= decoded.size(); ++i) {
        tokens.push_back(encode_utf8(
            std::u32string_view(decoded).substr(i, static_cast<std::size_t>(n))));
      }
    }
  }
  return tokens;
}

TfidfModel fit_tfidf(const LabeledDataset& corpus,
                     const TokenizerConfig& tokenizer,
                     std::size_t max_features) {
  validate(tokenizer);
  if (corpus.documents.empty()) {
    throw DataError("cannot fit tf-idf on an empty corpus");
  }
  if (max_features == 0) throw UsageError("max_features must be positive");

  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : corpus.documents) {
    std::unordered_set<std::string> seen;
    for (auto& token : tokenize(doc.text, tokenizer)) {
      seen.insert(std::move(token));
    }
    for (const auto& token : seen) ++df[token];
  }

  // Highest document frequency first, ties broken lexicographically; the
  // kept set is then re-sorted so columns run in token order.
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > max_features) ranked.resize(max_features);
  std::sort(ranked.begin(), ranked.end());

  TfidfModel model;
  model.tokenizer = tokenizer;
  model.max_features = max_features;
  const double n = static_cast<double>(corpus.documents.size());
  for (std::uint32_t c = 0; c < ranked.size(); ++c) {
    model.tokens.push_back(ranked[c].first);
    model.vocabulary.emplace(ranked[c].first, c);
    model.idf.push_back(
        std::log((1.0 + n) / (1.0 + static_cast<double>(ranked[c].second))) +
        1.0);
  }
  return model;
}

namespace {

void l2_normalize(std::vector<double>& values) {
  const auto& k = kernels::active();
  const double ss = k.sum_squares(values.data(), values.size());
  if (ss > 0.0) k.scale(values.data(), values.size(), 1.0 / std::sqrt(ss));
}

}  // namespace

FeatureVector vectorize(std::string_view text, const TfidfModel& model) {
  std::map<std::uint32_t, double> tf;
  for (const auto& token : tokenize(text, model.tokenizer)) {
    auto it = model.vocabulary.find(token);
    if (it != model.vocabulary.end()) tf[it->second] += 1.0;
  }
  FeatureVector out;
  out.dimension = model.dimension();
  out.indices.reserve(tf.size());
  out.values.reserve(tf.size());
  for (const auto& [column, count] : tf) {
    out.indices.push_back(column);
    out.values.push_back(count * model.idf[column]);
  }
  l2_normalize(out.values);
  return out;
}

std::size_t FeatureSpace::dimension() const {
  std::size_t total = 0;
  for (const auto& block : blocks) total += block.dimension();
  return total;
}

std::vector<BlockSpec> default_block_specs() {
  BlockSpec word;
  word.tokenizer.mode = TokenMode::word;
  word.tokenizer.ngram_lo = 1;
  word.tokenizer.ngram_hi = 2;
  BlockSpec chars;
  chars.tokenizer.mode = TokenMode::char_ngram;
  chars.tokenizer.ngram_lo = 3;
  chars.tokenizer.ngram_hi = 5;
  return {word, chars};
}

FeatureSpace fit_feature_space(const LabeledDataset& corpus,
                               const std::vector<BlockSpec>& specs) {
  if (specs.empty()) throw UsageError("feature space needs at least one block");
  FeatureSpace space;
  for (const auto& spec : specs) {
    space.blocks.push_back(fit_tfidf(corpus, spec.tokenizer, spec.max_features));
  }
  return space;
}

FeatureVector vectorize(std::string_view text, const FeatureSpace& space) {
  FeatureVector out;
  out.dimension = space.dimension();
  std::uint32_t offset = 0;
  for (const auto& block : space.blocks) {
    FeatureVector part = vectorize(text, block);
    for (std::size_t i = 0; i < part.indices.size(); ++i) {
      out.indices.push_back(part.indices[i] + offset);
      out.values.push_back(part.values[i]);
    }
    offset += static_cast<std::uint32_t>(block.dimension());
  }
  l2_normalize(out.values);
  return out;
}

std::vector<FeatureVector> vectorize_dataset(const LabeledDataset& dataset,
                                             const FeatureSpace& space) {
  std::vector<FeatureVector> out;
  out.reserve(dataset.size());
  for (const auto& doc : dataset.documents) {
    out.push_back(vectorize(doc.text, space));
  }
  return out;
}

nlohmann::ordered_json tokenizer_to_json(const TokenizerConfig& config) {
  nlohmann::ordered_json j;
  j["mode"] = config.mode == TokenMode::word ? "word" : "char_ngram";
  j["ngram_lo"] = config.ngram_lo;
  j["ngram_hi"] = config.ngram_hi;
  j["lowercase"] = config.lowercase;
  j["unicode_normalize"] = config.unicode_normalize;
  return j;
}

TokenizerConfig tokenizer_from_json(const nlohmann::json& j) {
  TokenizerConfig config;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "word") {
    config.mode = TokenMode::word;
  } else if (mode == "char_ngram") {
    config.mode = TokenMode::char_ngram;
  } else {
    throw DataError("unknown tokenizer mode \"" + mode + "\"");
  }
  config.ngram_lo = j.at("ngram_lo").get<int>();
  config.ngram_hi = j.at("ngram_hi").get<int>();
  config.lowercase = j.at("lowercase").get<bool>();
  config.unicode_normalize = j.at("unicode_normalize").get<bool>();
  validate(config);
  return config;
}

namespace {

constexpr int kFeatureSpaceVersion = 1;

nlohmann::ordered_json tfidf_to_json(const TfidfModel& model) {
  nlohmann::ordered_json j;
  j["tokenizer"] = tokenizer_to_json(model.tokenizer);
  j["max_features"] = model.max_features;
  nlohmann::ordered_json vocab = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < model.tokens.size(); ++c) {
    vocab[model.tokens[c]] = c;
  }
  j["vocabulary"] = std::move(vocab);
  j["idf"] = model.idf;
  return j;
}

TfidfModel tfidf_from_json(const nlohmann::json& j) {
  TfidfModel model;
  model.tokenizer = tokenizer_from_json(j.at("tokenizer"));
  model.max_features = j.at("max_features").get<std::size_t>();
  const auto& vocab = j.at("vocabulary");
  if (!vocab.is_object()) {
    throw DataError("tf-idf model: \"vocabulary\" must be an object");
  }
  model.tokens.assign(vocab.size(), {});
  for (const auto& [token, column] : vocab.items()) {
    if (!column.is_number_unsigned() ||
        column.get<std::size_t>() >= model.tokens.size()) {
      throw DataError("tf-idf model: column index for token \"" + token +
                      "\" out of range");
    }
    const auto c = column.get<std::uint32_t>();
    if (!model.tokens[c].empty() || model.vocabulary.count(token) != 0) {
      throw DataError("tf-idf model: duplicate column " + std::to_string(c));
    }
    model.tokens[c] = token;
    model.vocabulary.emplace(token, c);
  }
  model.idf = j.at("idf").get<std::vector<double>>();
  if (model.idf.size() != model.tokens.size()) {
    throw DataError("tf-idf model: idf length " +
                    std::to_string(model.idf.size()) +
                    " does not match vocabulary size " +
                    std::to_string(model.tokens.size()));
  }
  if (model.tokens.size() > model.max_features) {
    throw DataError("tf-idf model: vocabulary exceeds max_features");
  }
  for (double value : model.idf) {
    if (!(value > 0.0)) {
      throw DataError("tf-idf model: idf values must be positive");
    }
  }
  return model;
}

}  // namespace

nlohmann::ordered_json feature_space_to_json(const FeatureSpace& space) {
  nlohmann::ordered_json j;
  j["version"] = kFeatureSpaceVersion;
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto& block : space.blocks) blocks.push_back(tfidf_to_json(block));
  j["blocks"] = std::move(blocks);
  return j;
}

FeatureSpace feature_space_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version") || !j.contains("blocks")) {
    throw DataError("feature space JSON needs \"version\" and \"blocks\"");
  }
  if (j.at("version").get<int>() != kFeatureSpaceVersion) {
    throw DataError("unsupported feature space version " +
                    j.at("version").dump());
  }
  FeatureSpace space;
  for (const auto& block : j.at("blocks")) {
    space.blocks.push_back(tfidf_from_json(block));
  }
  if (space.blocks.empty()) {
    throw DataError("feature space has no blocks");
  }
  return space;
}

void save_feature_space(const FeatureSpace& space,
                        const std::filesystem::path& path) {
  atomic_write_file(path, feature_space_to_json(space).dump() + "\n");
}

FeatureSpace load_feature_space(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": invalid feature space JSON: " + e.what());
  }
  return feature_space_from_json(j);
}

}  // namespace mgtdetect
