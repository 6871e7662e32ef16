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

#include "mgtdetect/obfusc.hpp"

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mgtdetect/common.hpp"
#include "mgtdetect/io.hpp"
#include "mgtdetect/utf8.hpp"

namespace mgtdetect {

namespace {

std::string codepoint_str(char32_t c) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(c));
  return buf;
}

}  // namespace

HomoglyphMap::HomoglyphMap(std::map<char32_t, char32_t> entries)
    : entries_(std::move(entries)) {
  std::set<char32_t> replacements;
  for (const auto& [source, replacement] : entries_) {
    if (source == replacement) {
      throw DataError("homoglyph map: " + codepoint_str(source) +
                      " maps to itself");
    }
    if (!replacements.insert(replacement).second) {
      throw DataError("homoglyph map: replacement " +
                      codepoint_str(replacement) +
                      " used for more than one source");
    }
  }
  for (char32_t replacement : replacements) {
    if (entries_.count(replacement) != 0) {
      throw DataError("homoglyph map: " + codepoint_str(replacement) +
                      " is both a source and a replacement");
    }
  }
}

const HomoglyphMap& default_homoglyph_map() {
  static const HomoglyphMap map{{
      {U'a', U'\u0430'}, {U'c', U'\u0441'}, {U'e', U'\u0435'},
      {U'i', U'\u0456'}, {U'j', U'\u0458'}, {U'o', U'\u043E'},
      {U'p', U'\u0440'}, {U's', U'\u0455'}, {U'x', U'\u0445'},
      {U'y', U'\u0443'}, {U'A', U'\u0410'}, {U'C', U'\u0421'},
      {U'E', U'\u0415'}, {U'O', U'\u041E'}, {U'P', U'\u0420'},
      {U'X', U'\u0425'},
  }};
  return map;
}

namespace {

char32_t single_codepoint(const nlohmann::json& value, const char* field,
                          std::size_t index) {
  const std::string context =
      "homoglyph map entry " + std::to_string(index) + ": ";
  if (!value.is_string()) {
    throw DataError(context + "\"" + field + "\" must be a string");
  }
  const std::u32string decoded = decode_utf8(value.get<std::string>());
  if (decoded.size() != 1) {
    throw DataError(context + "\"" + field +
                    "\" must be exactly one code point");
  }
  return decoded[0];
}

}  // namespace

HomoglyphMap load_homoglyph_map(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!parsed.is_array()) {
    throw DataError(path.string() + ": homoglyph map must be a JSON array");
  }
  std::map<char32_t, char32_t> entries;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const nlohmann::json& item = parsed[i];
    if (!item.is_object()) {
      throw DataError("homoglyph map entry " + std::to_string(i) +
                      ": must be an object");
    }
    if (!item.contains("source") || !item.contains("replacement")) {
      throw DataError("homoglyph map entry " + std::to_string(i) +
                      ": needs \"source\" and \"replacement\"");
    }
    const char32_t source = single_codepoint(item["source"], "source", i);
    const char32_t replacement =
        single_codepoint(item["replacement"], "replacement", i);
    if (!entries.emplace(source, replacement).second) {
      throw DataError("homoglyph map entry " + std::to_string(i) +
                      ": duplicate source " + codepoint_str(source));
    }
  }
  return HomoglyphMap(std::move(entries));
}

std::string homoglyph_map_to_json(const HomoglyphMap& map) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& [source, replacement] : map.entries()) {
    nlohmann::ordered_json item;
    item["source"] = encode_utf8(source);
    item["replacement"] = encode_utf8(replacement);
    out.push_back(std::move(item));
  }
  return out.dump(2) + "\n";
}

std::string obfuscate_text(std::string_view text, const HomoglyphMap& map,
                           double char_prob, SplitMix64& rng) {
  if (char_prob < 0.0 || char_prob > 1.0) {
    throw UsageError("char_prob must lie in [0, 1]");
  }
  std::u32string decoded = decode_utf8(text);
  for (char32_t& c : decoded) {
    auto it = map.entries().find(c);
    if (it == map.entries().end()) continue;
    // One draw per mapped occurrence, even when char_prob is 0 or 1, so the
    // generator state advances identically for every probability.
    const double u = rng.next_double();
    if (u < char_prob) c = it->second;
  }
  return encode_utf8(decoded);
}

std::string restore_text(std::string_view text, const HomoglyphMap& map) {
  std::map<char32_t, char32_t> inverse;
  for (const auto& [source, replacement] : map.entries()) {
    inverse.emplace(replacement, source);
  }
  std::u32string decoded = decode_utf8(text);
  for (char32_t& c : decoded) {
    auto it = inverse.find(c);
    if (it != inverse.end()) c = it->second;
  }
  return encode_utf8(decoded);
}

ObfuscationResult obfuscate_dataset_portion(const LabeledDataset& dataset,
                                            const HomoglyphMap& map,
                                            const ObfuscationConfig& config) {
  if (config.doc_fraction < 0.0 || config.doc_fraction > 1.0) {
    throw UsageError("doc_fraction must lie in [0, 1]");
  }
  const std::size_t n = dataset.documents.size();
  const std::size_t attack_count =
      std::min(n, round_half_up(config.doc_fraction * static_cast<double>(n)));

  std::vector<std::size_t> positions(n);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  SplitMix64 selector(config.seed);
  shuffle(positions, selector);

  std::set<std::size_t> attacked_positions(
      positions.begin(),
      positions.begin() + static_cast<std::ptrdiff_t>(attack_count));

  ObfuscationResult result{LabeledDataset{dataset.taxonomy, {}}, {}};
  result.dataset.documents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Document doc = dataset.documents[i];
    if (attacked_positions.count(i) != 0) {
      SplitMix64 rng = SplitMix64::derive(config.seed, doc.id);
      doc.text = obfuscate_text(doc.text, map, config.char_prob, rng);
      result.attacked_ids.insert(doc.id);
    }
    result.dataset.documents.push_back(std::move(doc));
  }
  return result;
}

}  // namespace mgtdetect
