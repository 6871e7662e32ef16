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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mgtdetect/corpus.hpp"
#include "mgtdetect/io.hpp"
#include "test_util.hpp"

using namespace mgtdetect;
using mgtdetect::testing::TempDir;
using doctest::Contains;

namespace {

Document doc(std::string id, std::string text, int label) {
  return Document{std::move(id), std::move(text), label, std::nullopt};
}

// n documents per class under the given taxonomy, ids "c<label>_<i>".
LabeledDataset uniform_dataset(const ClassTaxonomy& taxonomy,
                               const std::vector<std::size_t>& per_class) {
  LabeledDataset d{taxonomy, {}};
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    for (std::size_t i = 0; i < per_class[c]; ++i) {
      d.documents.push_back(doc(
          "c" + std::to_string(c) + "_" + std::to_string(i), "text",
          static_cast<int>(c)));
    }
  }
  return d;
}

std::multiset<std::string> id_multiset(const LabeledDataset& d) {
  std::multiset<std::string> out;
  for (const auto& document : d.documents) out.insert(document.id);
  return out;
}

std::vector<std::string> id_sequence(const LabeledDataset& d) {
  std::vector<std::string> out;
  for (const auto& document : d.documents) out.push_back(document.id);
  return out;
}

}  // namespace

TEST_CASE("built-in taxonomies") {
  const auto& binary = ClassTaxonomy::binary();
  CHECK(binary.size() == 2);
  CHECK(binary.classes()[0].description == "human");
  CHECK(binary.classes()[1].description == "machine");
  CHECK(binary.contains(0));
  CHECK(binary.contains(1));
  CHECK_FALSE(binary.contains(2));
  CHECK_FALSE(binary.contains(-1));

  const auto& collab = ClassTaxonomy::collab6();
  CHECK(collab.size() == 6);
  CHECK(collab.classes()[0].description == "fully human-written");
  CHECK(collab.classes()[1].description ==
        "human-written, then machine-polished");
  CHECK(collab.classes()[2].description ==
        "machine-written, then machine-humanized");
  CHECK(collab.classes()[3].description ==
        "human-initiated, then machine-continued");
  CHECK(collab.classes()[4].description == "deeply-mixed text");
  CHECK(collab.classes()[5].description ==
        "machine-written, then human-edited");
}

TEST_CASE("taxonomy validation") {
  CHECK_THROWS_AS(ClassTaxonomy("empty", {}), DataError);
  CHECK_THROWS_WITH_AS(
      ClassTaxonomy("gap", {{0, "a"}, {2, "b"}}),
      Contains("contiguous"), DataError);
  CHECK_THROWS_AS(ClassTaxonomy("offset", {{1, "a"}, {2, "b"}}), DataError);
}

TEST_CASE("taxonomy JSON roundtrip and file loading") {
  const auto& collab = ClassTaxonomy::collab6();
  const auto j = taxonomy_to_json(collab);
  const auto back = taxonomy_from_json(j);
  CHECK(back == collab);

  TempDir tmp;
  const auto path = tmp.write("tax.json", j.dump());
  CHECK(load_taxonomy(path) == collab);

  const auto bad = tmp.write("bad.json", "{not json");
  CHECK_THROWS_WITH_AS(load_taxonomy(bad), Contains("invalid taxonomy JSON"),
                       DataError);
  CHECK_THROWS_WITH_AS(taxonomy_from_json(nlohmann::json::array()),
                       Contains("\"name\""), DataError);
}

TEST_CASE("load_jsonl parses valid records in order") {
  TempDir tmp;
  const auto path = tmp.write(
      "data.jsonl",
      "{\"id\":\"a\",\"text\":\"hello\",\"label\":0}\n"
      "{\"id\":\"b\",\"text\":\"world\",\"label\":1,\"genre\":\"news\","
      "\"extra\":[1,2]}\n");
  const auto d = load_jsonl(path, ClassTaxonomy::binary());
  REQUIRE(d.size() == 2);
  CHECK(d.documents[0] == doc("a", "hello", 0));
  CHECK(d.documents[1].id == "b");
  CHECK(d.documents[1].label == 1);
  CHECK(d.documents[1].genre == "news");
}

TEST_CASE("load_jsonl handles empty files and CRLF") {
  TempDir tmp;
  const auto empty = tmp.write("empty.jsonl", "");
  CHECK(load_jsonl(empty, ClassTaxonomy::binary()).size() == 0);

  const auto crlf = tmp.write(
      "crlf.jsonl", "{\"id\":\"a\",\"text\":\"t\",\"label\":1}\r\n");
  const auto d = load_jsonl(crlf, ClassTaxonomy::binary());
  REQUIRE(d.size() == 1);
  CHECK(d.documents[0].text == "t");
}

TEST_CASE("load_jsonl error reporting carries line numbers") {
  TempDir tmp;
  const std::string good = "{\"id\":\"ok\",\"text\":\"t\",\"label\":0}\n";

  SUBCASE("malformed JSON") {
    const auto p = tmp.write("f.jsonl", good + "{oops\n");
    CHECK_THROWS_WITH_AS(load_jsonl(p, ClassTaxonomy::binary()),
                         Contains(":2: malformed JSON"), DataError);
  }
  SUBCASE("non-object line") {
    const auto p = tmp.write("f.jsonl", "[1,2]\n");
    CHECK_THROWS_WITH_AS(load_jsonl(p, ClassTaxonomy::binary()),
                         Contains(":1: expected a JSON object"), DataError);
  }
  SUBCASE("label out of range under collab6") {
    const auto p = tmp.write(
        "f.jsonl", good + "{\"id\":\"x\",\"text\":\"t\",\"label\":6}\n");
    CHECK_THROWS_WITH_AS(load_jsonl(p, ClassTaxonomy::collab6()),
                         Contains(":2: label out of range: 6 not in 0..5"),
                         DataError);
  }
  SUBCASE("negative label") {
    const auto p = tmp.write(
        "f.jsonl", "{\"id\":\"x\",\"text\":\"t\",\"label\":-1}\n");
    CHECK_THROWS_WITH_AS(load_jsonl(p, ClassTaxonomy::binary()),
                         Contains("label out of range"), DataError);
  }
  SUBCASE("non-integer label") {
    const auto p = tmp.write(
        "f.jsonl", "{\"id\":\"x\",\"text\":\"t\",\"label\":\"1\"}\n");
    CHECK_THROWS_WITH_AS(load_jsonl(p, ClassTaxonomy::binary()),
                         Contains("\"label\" must be an integer"), DataError);
  }
  SUBCASE("duplicate id") {
    const auto p = tmp.write("f.jsonl", good + good);
    CHECK_THROWS_WITH_AS(load_jsonl(p, ClassTaxonomy::binary()),
                         Contains(":2: duplicate id \"ok\""), DataError);
  }
  SUBCASE("missing id") {
    const auto p = tmp.write("f.jsonl", "{\"text\":\"t\",\"label\":0}\n");
    CHECK_THROWS_WITH_AS(load_jsonl(p, ClassTaxonomy::binary()),
                         Contains("missing or non-string \"id\""), DataError);
  }
  SUBCASE("empty id") {
    const auto p = tmp.write(
        "f.jsonl", "{\"id\":\"\",\"text\":\"t\",\"label\":0}\n");
    CHECK_THROWS_WITH_AS(load_jsonl(p, ClassTaxonomy::binary()),
                         Contains("empty \"id\""), DataError);
  }
  SUBCASE("missing text") {
    const auto p = tmp.write("f.jsonl", "{\"id\":\"x\",\"label\":0}\n");
    CHECK_THROWS_WITH_AS(load_jsonl(p, ClassTaxonomy::binary()),
                         Contains("missing or non-string \"text\""),
                         DataError);
  }
  SUBCASE("missing label") {
    const auto p = tmp.write("f.jsonl", "{\"id\":\"x\",\"text\":\"t\"}\n");
    CHECK_THROWS_WITH_AS(load_jsonl(p, ClassTaxonomy::binary()),
                         Contains("missing \"label\""), DataError);
  }
  SUBCASE("non-string genre") {
    const auto p = tmp.write(
        "f.jsonl", "{\"id\":\"x\",\"text\":\"t\",\"label\":0,\"genre\":3}\n");
    CHECK_THROWS_WITH_AS(load_jsonl(p, ClassTaxonomy::binary()),
                         Contains("\"genre\" must be a string"), DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_WITH_AS(
        load_jsonl(tmp.path() / "nope.jsonl", ClassTaxonomy::binary()),
        Contains("cannot open"), DataError);
  }
}

TEST_CASE("load_jsonl ingest options") {
  TempDir tmp;
  const auto empty_text = tmp.write(
      "e.jsonl", "{\"id\":\"x\",\"text\":\"\",\"label\":0}\n");
  CHECK_THROWS_WITH_AS(load_jsonl(empty_text, ClassTaxonomy::binary()),
                       Contains("empty \"text\""), DataError);
  IngestOptions allow;
  allow.allow_empty_text = true;
  CHECK(load_jsonl(empty_text, ClassTaxonomy::binary(), allow).size() == 1);

  const auto unlabeled = tmp.write("u.jsonl", "{\"id\":\"x\",\"text\":\"t\"}\n");
  IngestOptions no_label;
  no_label.require_label = false;
  const auto d = load_jsonl(unlabeled, ClassTaxonomy::binary(), no_label);
  REQUIRE(d.size() == 1);
  CHECK(d.documents[0].label == 0);
}

TEST_CASE("save_jsonl roundtrip is the identity") {
  TempDir tmp;
  LabeledDataset d{ClassTaxonomy::binary(), {}};
  d.documents.push_back(doc("a", "plain ascii", 0));
  d.documents.push_back(
      Document{"b", "quotes \" and \\ and\nnewline", 1, "social"});
  d.documents.push_back(doc("c", "ünïcodé ❤", 1));

  const auto path = tmp.path() / "out.jsonl";
  save_jsonl(d, path);
  const auto back = load_jsonl(path, ClassTaxonomy::binary());
  REQUIRE(back.size() == 3);
  CHECK(back.documents == d.documents);
}

TEST_CASE("save_jsonl preserves Cyrillic homoglyph text byte for byte") {
  TempDir tmp;
  // "banana" with two Cyrillic U+0430 substitutions.
  const std::string homoglyph = "b\xD0\xB0n\xD0\xB0n\xD0\xB0";
  LabeledDataset d{ClassTaxonomy::binary(), {doc("h", homoglyph, 1)}};
  const auto path = tmp.path() / "out.jsonl";
  save_jsonl(d, path);
  const auto back = load_jsonl(path, ClassTaxonomy::binary());
  REQUIRE(back.size() == 1);
  CHECK(back.documents[0].text == homoglyph);
}

TEST_CASE("save_jsonl of an empty dataset yields an empty file") {
  TempDir tmp;
  const auto path = tmp.path() / "out.jsonl";
  save_jsonl(LabeledDataset{ClassTaxonomy::binary(), {}}, path);
  CHECK(read_file(path).empty());
}

TEST_CASE("class_distribution counts per class") {
  LabeledDataset d{ClassTaxonomy::binary(),
                   {doc("a", "t", 0), doc("b", "t", 0), doc("c", "t", 1)}};
  CHECK(class_distribution(d) == std::vector<std::size_t>{2, 1});

  CHECK(class_distribution(LabeledDataset{ClassTaxonomy::collab6(), {}}) ==
        std::vector<std::size_t>(6, 0));

  const auto uniform =
      uniform_dataset(ClassTaxonomy::collab6(), std::vector<std::size_t>(6, 100));
  CHECK(uniform.size() == 600);
  CHECK(class_distribution(uniform) == std::vector<std::size_t>(6, 100));
}

TEST_CASE("merge_datasets concatenates in order") {
  LabeledDataset a{ClassTaxonomy::binary(), {doc("a1", "t", 0), doc("a2", "t", 1)}};
  LabeledDataset b{ClassTaxonomy::binary(),
                   {doc("b1", "t", 0), doc("b2", "t", 1), doc("b3", "t", 0)}};
  const auto merged = merge_datasets(a, b);
  CHECK(merged.size() == 5);
  CHECK(id_sequence(merged) ==
        std::vector<std::string>{"a1", "a2", "b1", "b2", "b3"});

  const auto with_empty =
      merge_datasets(a, LabeledDataset{ClassTaxonomy::binary(), {}});
  CHECK(with_empty.documents == a.documents);
}

TEST_CASE("merge_datasets rejects collisions and mismatches") {
  LabeledDataset a{ClassTaxonomy::binary(), {doc("x1", "t", 0)}};
  LabeledDataset b{ClassTaxonomy::binary(), {doc("x1", "u", 1)}};
  CHECK_THROWS_WITH_AS(merge_datasets(a, b), Contains("\"x1\""), DataError);

  LabeledDataset c{ClassTaxonomy::collab6(), {doc("y", "t", 3)}};
  CHECK_THROWS_WITH_AS(merge_datasets(a, c), Contains("taxonomies"),
                       DataError);
}

TEST_CASE("balanced_holdout per-class counts, exhaustively for small sizes") {
  for (std::size_t quota = 1; quota <= 5; ++quota) {
    for (std::size_t n0 = 0; n0 <= quota + 3; ++n0) {
      for (std::size_t n1 = 0; n1 <= quota + 3; ++n1) {
        const auto d = uniform_dataset(ClassTaxonomy::binary(), {n0, n1});
        const auto result = balanced_holdout(d, SplitSpec{quota, 7});

        const auto holdout_counts = class_distribution(result.holdout);
        CHECK(holdout_counts[0] == std::min(quota, n0));
        CHECK(holdout_counts[1] == std::min(quota, n1));

        // Partition: union = input as id multisets, intersection empty.
        auto ids = id_multiset(result.train);
        for (const auto& document : result.holdout.documents) {
          CHECK(ids.count(document.id) == 0);
          ids.insert(document.id);
        }
        CHECK(ids == id_multiset(d));

        const std::size_t expect_warnings =
            static_cast<std::size_t>(n0 < quota) +
            static_cast<std::size_t>(n1 < quota);
        CHECK(result.warnings.size() == expect_warnings);
      }
    }
  }
}

TEST_CASE("balanced_holdout with the 500-per-class default") {
  const auto d =
      uniform_dataset(ClassTaxonomy::collab6(), std::vector<std::size_t>(6, 600));
  const auto result = balanced_holdout(d, SplitSpec{500, 42});
  CHECK(result.holdout.size() == 3000);
  CHECK(result.train.size() == 600);
  CHECK(class_distribution(result.holdout) ==
        std::vector<std::size_t>(6, 500));
  CHECK(class_distribution(result.train) == std::vector<std::size_t>(6, 100));
  CHECK(result.warnings.empty());
}

TEST_CASE("balanced_holdout moves short classes whole, with a warning") {
  const auto d = uniform_dataset(ClassTaxonomy::binary(), {600, 200});
  const auto result = balanced_holdout(d, SplitSpec{500, 3});
  const auto counts = class_distribution(result.holdout);
  CHECK(counts[0] == 500);
  CHECK(counts[1] == 200);
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.warnings[0] ==
        "class 1 has 200 documents, below the quota of 500; all moved to "
        "holdout");
}

TEST_CASE("balanced_holdout is deterministic per seed") {
  const auto d = uniform_dataset(ClassTaxonomy::binary(), {100, 100});
  const auto r1 = balanced_holdout(d, SplitSpec{50, 11});
  const auto r2 = balanced_holdout(d, SplitSpec{50, 11});
  CHECK(id_sequence(r1.holdout) == id_sequence(r2.holdout));
  CHECK(id_sequence(r1.train) == id_sequence(r2.train));

  const auto r3 = balanced_holdout(d, SplitSpec{50, 12});
  CHECK(id_sequence(r3.holdout) != id_sequence(r1.holdout));
}

TEST_CASE("balanced_holdout preserves input order within each part") {
  const auto d = uniform_dataset(ClassTaxonomy::binary(), {40, 40});
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < d.size(); ++i) position[d.documents[i].id] = i;

  const auto result = balanced_holdout(d, SplitSpec{10, 5});
  for (const auto* part : {&result.train, &result.holdout}) {
    for (std::size_t i = 1; i < part->documents.size(); ++i) {
      CHECK(position.at(part->documents[i - 1].id) <
            position.at(part->documents[i].id));
    }
  }
}

TEST_CASE("balanced_holdout rejects a zero quota") {
  const auto d = uniform_dataset(ClassTaxonomy::binary(), {2, 2});
  CHECK_THROWS_AS(balanced_holdout(d, SplitSpec{0, 1}), UsageError);
}

TEST_CASE("stratified_split takes round-half-up per class") {
  SUBCASE("even halves") {
    const auto d = uniform_dataset(ClassTaxonomy::binary(), {10, 10});
    const auto result = stratified_split(d, 0.5, 1);
    CHECK(class_distribution(result.part1) == std::vector<std::size_t>{5, 5});
    CHECK(class_distribution(result.part2) == std::vector<std::size_t>{5, 5});
  }
  SUBCASE("singleton class at fraction 0.9 lands in part1") {
    const auto d = uniform_dataset(ClassTaxonomy::binary(), {1, 1});
    const auto result = stratified_split(d, 0.9, 1);
    CHECK(result.part1.size() == 2);
    CHECK(result.part2.size() == 0);
  }
  SUBCASE("half-way counts round up") {
    // 0.25 * 10 = 2.5 → 3.
    const auto d = uniform_dataset(ClassTaxonomy::binary(), {10, 10});
    const auto result = stratified_split(d, 0.25, 1);
    CHECK(class_distribution(result.part1) == std::vector<std::size_t>{3, 3});
  }
}

TEST_CASE("stratified_split partitions the input deterministically") {
  const auto d = uniform_dataset(ClassTaxonomy::collab6(), {7, 3, 0, 12, 1, 5});
  for (double fraction : {0.2, 0.5, 0.8}) {
    const auto r1 = stratified_split(d, fraction, 99);
    const auto r2 = stratified_split(d, fraction, 99);
    CHECK(id_sequence(r1.part1) == id_sequence(r2.part1));
    CHECK(id_sequence(r1.part2) == id_sequence(r2.part2));

    auto ids = id_multiset(r1.part1);
    for (const auto& document : r1.part2.documents) {
      CHECK(ids.count(document.id) == 0);
      ids.insert(document.id);
    }
    CHECK(ids == id_multiset(d));
  }
}

TEST_CASE("stratified_split rejects out-of-range fractions") {
  const auto d = uniform_dataset(ClassTaxonomy::binary(), {2, 2});
  CHECK_THROWS_AS(stratified_split(d, 0.0, 1), UsageError);
  CHECK_THROWS_AS(stratified_split(d, 1.0, 1), UsageError);
  CHECK_THROWS_AS(stratified_split(d, -0.5, 1), UsageError);
}
