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
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "mgtdetect/corpus.hpp"
#include "mgtdetect/rng.hpp"

namespace mgtdetect {

/// Substitution table of visually confusable code points. Injective and
/// chain-free (no replacement is itself a source), so every obfuscation can
/// be undone by restore_text.
class HomoglyphMap {
 public:
  explicit HomoglyphMap(std::map<char32_t, char32_t> entries);

  const std::map<char32_t, char32_t>& entries() const { return entries_; }
  bool maps(char32_t c) const { return entries_.count(c) != 0; }

 private:
  std::map<char32_t, char32_t> entries_;
};

/// The built-in table: 16 Latin letters mapped to their Cyrillic look-alikes
/// (a c e i j o p s x y and A C E O P X).
const HomoglyphMap& default_homoglyph_map();

/// JSON array of {"source": "a", "replacement": "а"} records, one code point
/// each side. Validates the HomoglyphMap invariants.
HomoglyphMap load_homoglyph_map(const std::filesystem::path& path);
std::string homoglyph_map_to_json(const HomoglyphMap& map);

struct ObfuscationConfig {
  double doc_fraction = 0.1;  // portion of documents attacked
  double char_prob = 1.0;     // per mapped-character substitution probability
  std::uint64_t seed = 0;
};

/// Replaces each mapped character with probability char_prob, drawing one
/// uniform per mapped occurrence from the supplied generator. Unmapped
/// characters pass through; the count of Unicode scalar values is preserved.
std::string obfuscate_text(std::string_view text, const HomoglyphMap& map,
                           double char_prob, SplitMix64& rng);

/// Maps every replacement character back to its source. Inverse of
/// obfuscate_text on texts that contained no replacement characters already.
std::string restore_text(std::string_view text, const HomoglyphMap& map);

struct ObfuscationResult {
  LabeledDataset dataset;
  std::set<std::string> attacked_ids;
};

/// Attacks round_half_up(doc_fraction * N) documents chosen by a seeded
/// shuffle; labels, ids and document order are unchanged. Each attacked
/// document uses an independent generator derived from (seed, id), so the
/// result does not depend on processing order.
ObfuscationResult obfuscate_dataset_portion(const LabeledDataset& dataset,
                                            const HomoglyphMap& map,
                                            const ObfuscationConfig& config);

}  // namespace mgtdetect
