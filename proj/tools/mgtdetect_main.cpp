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

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mgtdetect/common.hpp"
#include "mgtdetect/corpus.hpp"
#include "mgtdetect/features.hpp"
#include "mgtdetect/io.hpp"
#include "mgtdetect/metrics.hpp"
#include "mgtdetect/model.hpp"
#include "mgtdetect/obfusc.hpp"
#include "mgtdetect/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace mgtdetect;

namespace {

// ---------------------------------------------------------------------------
// Experiment configuration
//
// One JSON file describes a whole run: input paths, the obfuscation attack,
// the feature blocks, and the training hyperparameters. Global flags can
// override the seed and the output directory; --mode selects the binary or
// the six-class flow. All configuration problems exit with the usage code.

struct Context {
  std::string mode = "binary";
  fs::path out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  std::optional<fs::path> config_path;
  std::string config_bytes;
  json config = json::object();
};

const ClassTaxonomy& taxonomy_for_mode(const std::string& mode) {
  return mode == "binary" ? ClassTaxonomy::binary() : ClassTaxonomy::collab6();
}

void check_keys(const json& object, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : object.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      std::string hint;
      for (const char* key : allowed) {
        if (!hint.empty()) hint += ", ";
        hint += key;
      }
      throw UsageError("config " + where + " has unknown key \"" + item.key() +
                       "\"; expected one of " + hint);
    }
  }
}

const json* config_section(const Context& ctx, const char* name,
                           std::initializer_list<const char*> allowed) {
  if (!ctx.config.contains(name)) return nullptr;
  const json& section = ctx.config.at(name);
  if (!section.is_object()) {
    throw UsageError(std::string("config ") + name + " must be an object");
  }
  check_keys(section, name, allowed);
  return &section;
}

double config_number(const json& section, const std::string& where,
                     const char* key, double fallback) {
  if (!section.contains(key)) return fallback;
  if (!section.at(key).is_number()) {
    throw UsageError("config " + where + "." + key + " must be a number");
  }
  return section.at(key).get<double>();
}

std::uint64_t config_u64(const json& section, const std::string& where,
                         const char* key, std::uint64_t fallback) {
  if (!section.contains(key)) return fallback;
  if (!section.at(key).is_number_unsigned()) {
    throw UsageError("config " + where + "." + key +
                     " must be a non-negative integer");
  }
  return section.at(key).get<std::uint64_t>();
}

bool config_bool(const json& section, const std::string& where,
                 const char* key, bool fallback) {
  if (!section.contains(key)) return fallback;
  if (!section.at(key).is_boolean()) {
    throw UsageError("config " + where + "." + key + " must be a boolean");
  }
  return section.at(key).get<bool>();
}

std::string config_string(const json& section, const std::string& where,
                          const char* key, const std::string& fallback) {
  if (!section.contains(key)) return fallback;
  if (!section.at(key).is_string()) {
    throw UsageError("config " + where + "." + key + " must be a string");
  }
  return section.at(key).get<std::string>();
}

Context make_context(const std::string& mode,
                     const std::optional<std::string>& config_flag,
                     const std::optional<std::uint64_t>& seed_flag,
                     const std::optional<std::string>& out_dir_flag) {
  Context ctx;
  ctx.mode = mode;
  ctx.seed_override = seed_flag;
  if (config_flag) {
    ctx.config_path = fs::path(*config_flag);
    try {
      ctx.config_bytes = read_file(*ctx.config_path);
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
    try {
      ctx.config = json::parse(ctx.config_bytes);
    } catch (const json::parse_error& e) {
      throw UsageError(config_flag.value() + ": invalid config JSON: " +
                       e.what());
    }
    if (!ctx.config.is_object()) {
      throw UsageError(config_flag.value() + ": config must be a JSON object");
    }
    check_keys(ctx.config, "file",
               {"taxonomy", "paths", "obfuscation", "features", "train",
                "holdout", "out_dir"});
    const std::string taxonomy =
        config_string(ctx.config, "file", "taxonomy", "");
    const std::string expected = ctx.mode == "binary" ? "binary" : "collab6";
    if (!taxonomy.empty() && taxonomy != expected) {
      throw UsageError("config taxonomy \"" + taxonomy +
                       "\" does not match mode " + ctx.mode + " (expected \"" +
                       expected + "\")");
    }
  }
  if (out_dir_flag) {
    ctx.out_dir = fs::path(*out_dir_flag);
  } else {
    ctx.out_dir =
        fs::path(config_string(ctx.config, "file", "out_dir", "out"));
  }
  return ctx;
}

fs::path configured_input(const Context& ctx, const char* key,
                          const char* hint) {
  const json* paths =
      config_section(ctx, "paths", {"train", "validation", "ood", "test"});
  if (paths != nullptr) {
    const std::string value = config_string(*paths, "paths", key, "");
    if (!value.empty()) return fs::path(value);
  }
  throw UsageError(std::string("no ") + key + " input: set config paths." +
                   key + " or pass " + hint);
}

ObfuscationConfig obfuscation_config(const Context& ctx) {
  ObfuscationConfig config;
  const json* section = config_section(
      ctx, "obfuscation", {"doc_fraction", "char_prob", "seed", "map"});
  if (section != nullptr) {
    config.doc_fraction =
        config_number(*section, "obfuscation", "doc_fraction", 0.1);
    config.char_prob = config_number(*section, "obfuscation", "char_prob", 1.0);
    config.seed = config_u64(*section, "obfuscation", "seed", 0);
  }
  if (ctx.seed_override) config.seed = *ctx.seed_override;
  if (!(config.doc_fraction >= 0.0 && config.doc_fraction <= 1.0)) {
    throw UsageError("obfuscation doc_fraction must be in [0, 1]");
  }
  if (!(config.char_prob >= 0.0 && config.char_prob <= 1.0)) {
    throw UsageError("obfuscation char_prob must be in [0, 1]");
  }
  return config;
}

HomoglyphMap homoglyph_map_for(const Context& ctx,
                               const std::optional<std::string>& map_flag) {
  if (map_flag) return load_homoglyph_map(fs::path(*map_flag));
  const json* section = config_section(
      ctx, "obfuscation", {"doc_fraction", "char_prob", "seed", "map"});
  if (section != nullptr) {
    const std::string path = config_string(*section, "obfuscation", "map", "");
    if (!path.empty()) return load_homoglyph_map(fs::path(path));
  }
  return default_homoglyph_map();
}

std::vector<BlockSpec> block_specs(const Context& ctx) {
  const json* section = config_section(ctx, "features", {"blocks"});
  if (section == nullptr || !section->contains("blocks")) {
    return default_block_specs();
  }
  const json& blocks = section->at("blocks");
  if (!blocks.is_array() || blocks.empty()) {
    throw UsageError("config features.blocks must be a non-empty array");
  }
  std::vector<BlockSpec> specs;
  for (const auto& block : blocks) {
    if (!block.is_object()) {
      throw UsageError("config features.blocks entries must be objects");
    }
    check_keys(block, "features.blocks",
               {"mode", "ngram_lo", "ngram_hi", "lowercase",
                "unicode_normalize", "max_features"});
    BlockSpec spec;
    const std::string mode =
        config_string(block, "features.blocks", "mode", "");
    if (mode == "word") {
      spec.tokenizer.mode = TokenMode::word;
    } else if (mode == "char_ngram") {
      spec.tokenizer.mode = TokenMode::char_ngram;
    } else {
      throw UsageError("config features.blocks mode must be \"word\" or "
                       "\"char_ngram\"");
    }
    spec.tokenizer.ngram_lo = static_cast<int>(
        config_number(block, "features.blocks", "ngram_lo", 1));
    spec.tokenizer.ngram_hi = static_cast<int>(
        config_number(block, "features.blocks", "ngram_hi", 1));
    spec.tokenizer.lowercase =
        config_bool(block, "features.blocks", "lowercase", true);
    spec.tokenizer.unicode_normalize =
        config_bool(block, "features.blocks", "unicode_normalize", false);
    validate(spec.tokenizer);
    spec.max_features = static_cast<std::size_t>(
        config_u64(block, "features.blocks", "max_features", 50000));
    if (spec.max_features == 0) {
      throw UsageError("config features.blocks max_features must be positive");
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

const char* selection_metric_name(SelectionMetric metric) {
  return metric == SelectionMetric::mean_binary ? "mean_binary"
                                                : "macro_recall";
}

TrainConfig train_config(const Context& ctx) {
  TrainConfig config;
  config.selection_metric = ctx.mode == "binary" ? SelectionMetric::mean_binary
                                                 : SelectionMetric::macro_recall;
  const json* section = config_section(
      ctx, "train",
      {"learning_rate", "epochs", "batch_size", "seed", "selection_metric"});
  if (section != nullptr) {
    config.learning_rate =
        config_number(*section, "train", "learning_rate", config.learning_rate);
    config.epochs = static_cast<std::size_t>(
        config_u64(*section, "train", "epochs", config.epochs));
    config.batch_size = static_cast<std::size_t>(
        config_u64(*section, "train", "batch_size", config.batch_size));
    config.seed = config_u64(*section, "train", "seed", config.seed);
    const std::string metric = config_string(
        *section, "train", "selection_metric",
        selection_metric_name(config.selection_metric));
    if (metric == "mean_binary") {
      config.selection_metric = SelectionMetric::mean_binary;
    } else if (metric == "macro_recall") {
      config.selection_metric = SelectionMetric::macro_recall;
    } else {
      throw UsageError("config train.selection_metric must be \"mean_binary\" "
                       "or \"macro_recall\"");
    }
  }
  if (ctx.seed_override) config.seed = *ctx.seed_override;
  return config;
}

SplitSpec holdout_spec(const Context& ctx) {
  SplitSpec spec;
  const json* section = config_section(ctx, "holdout", {"per_class", "seed"});
  if (section != nullptr) {
    spec.holdout_per_class = static_cast<std::size_t>(
        config_u64(*section, "holdout", "per_class", spec.holdout_per_class));
    spec.seed = config_u64(*section, "holdout", "seed", spec.seed);
  }
  if (ctx.seed_override) spec.seed = *ctx.seed_override;
  return spec;
}

// ---------------------------------------------------------------------------
// Run manifests
//
// Every command writes <command>_manifest.json next to its outputs: the
// command, mode, config digest, and an FNV-1a digest of every input and
// output file. Reruns with identical configuration produce byte-identical
// manifests, so digests double as a determinism check. Deliberately no
// timestamps or host names.

std::string hex64(std::uint64_t value) {
  char buffer[24];
  std::snprintf(buffer, sizeof buffer, "0x%016" PRIx64, value);
  return buffer;
}

class Manifest {
 public:
  Manifest(const Context& ctx, const char* command) {
    j_["command"] = command;
    j_["mode"] = ctx.mode;
    if (ctx.config_path) {
      j_["config"] = {{"path", ctx.config_path->string()},
                      {"fnv1a64", hex64(fnv1a64(ctx.config_bytes))}};
    } else {
      j_["config"] = nullptr;
    }
    if (ctx.seed_override) {
      j_["seed_override"] = *ctx.seed_override;
    } else {
      j_["seed_override"] = nullptr;
    }
    j_["inputs"] = ordered_json::array();
    j_["outputs"] = ordered_json::array();
    j_["details"] = ordered_json::object();
  }

  void add_input(const fs::path& path) { add_file("inputs", path); }
  void add_output(const fs::path& path) { add_file("outputs", path); }
  ordered_json& details() { return j_["details"]; }

  void write(const fs::path& out_dir, const std::string& name) {
    atomic_write_file(out_dir / name, j_.dump(2) + "\n");
  }

 private:
  void add_file(const char* list, const fs::path& path) {
    const std::string bytes = read_file(path);
    j_[list].push_back({{"path", path.string()},
                        {"bytes", bytes.size()},
                        {"fnv1a64", hex64(fnv1a64(bytes))}});
  }

  ordered_json j_;
};

void write_id_lines(const std::set<std::string>& ids, const fs::path& path) {
  std::string text;
  for (const auto& id : ids) {
    text += id;
    text += '\n';
  }
  atomic_write_file(path, text);
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_mix(const Context& ctx) {
  const auto& taxonomy = taxonomy_for_mode(ctx.mode);
  const fs::path train_path = configured_input(ctx, "train", "--config");
  const fs::path validation_path =
      configured_input(ctx, "validation", "--config");
  const auto train_set = load_jsonl(train_path, taxonomy);
  const auto validation_set = load_jsonl(validation_path, taxonomy);
  const auto merged = merge_datasets(train_set, validation_set);

  fs::create_directories(ctx.out_dir);
  Manifest manifest(ctx, "mix");
  manifest.add_input(train_path);
  manifest.add_input(validation_path);

  if (ctx.mode == "binary") {
    const auto map = homoglyph_map_for(ctx, std::nullopt);
    const auto config = obfuscation_config(ctx);
    const auto result = obfuscate_dataset_portion(merged, map, config);
    save_jsonl(result.dataset, ctx.out_dir / "mixed_train.jsonl");
    write_id_lines(result.attacked_ids, ctx.out_dir / "attacked_ids.txt");
    manifest.details() = {{"documents", merged.size()},
                          {"attacked", result.attacked_ids.size()},
                          {"doc_fraction", config.doc_fraction},
                          {"char_prob", config.char_prob},
                          {"seed", config.seed}};
    manifest.add_output(ctx.out_dir / "mixed_train.jsonl");
    manifest.add_output(ctx.out_dir / "attacked_ids.txt");
    manifest.write(ctx.out_dir, "mix_manifest.json");
    std::printf("mix: %zu documents (%zu attacked) -> %s\n", merged.size(),
                result.attacked_ids.size(),
                (ctx.out_dir / "mixed_train.jsonl").string().c_str());
  } else {
    const auto spec = holdout_spec(ctx);
    const auto result = balanced_holdout(merged, spec);
    save_jsonl(result.train, ctx.out_dir / "mixed_train.jsonl");
    save_jsonl(result.holdout, ctx.out_dir / "holdout.jsonl");
    manifest.details() = {{"documents", merged.size()},
                          {"train", result.train.size()},
                          {"holdout", result.holdout.size()},
                          {"per_class", spec.holdout_per_class},
                          {"seed", spec.seed},
                          {"warnings", result.warnings}};
    manifest.add_output(ctx.out_dir / "mixed_train.jsonl");
    manifest.add_output(ctx.out_dir / "holdout.jsonl");
    manifest.write(ctx.out_dir, "mix_manifest.json");
    for (const auto& warning : result.warnings) {
      std::fprintf(stderr, "warning: %s\n", warning.c_str());
    }
    std::printf("mix: %zu documents -> %zu train + %zu holdout in %s\n",
                merged.size(), result.train.size(), result.holdout.size(),
                ctx.out_dir.string().c_str());
  }
  return 0;
}

int cmd_obfuscate(const Context& ctx, const std::string& input,
                  const std::optional<double>& fraction,
                  const std::optional<double>& char_prob,
                  const std::optional<std::string>& map_flag,
                  const std::optional<std::string>& export_map) {
  const auto& taxonomy = taxonomy_for_mode(ctx.mode);
  const fs::path input_path(input);
  const auto dataset = load_jsonl(input_path, taxonomy);

  auto config = obfuscation_config(ctx);
  if (fraction) config.doc_fraction = *fraction;
  if (char_prob) config.char_prob = *char_prob;
  if (!(config.doc_fraction >= 0.0 && config.doc_fraction <= 1.0)) {
    throw UsageError("--fraction must be in [0, 1]");
  }
  if (!(config.char_prob >= 0.0 && config.char_prob <= 1.0)) {
    throw UsageError("--char-prob must be in [0, 1]");
  }

  const auto map = homoglyph_map_for(ctx, map_flag);
  const auto result = obfuscate_dataset_portion(dataset, map, config);

  fs::create_directories(ctx.out_dir);
  Manifest manifest(ctx, "obfuscate");
  manifest.add_input(input_path);
  save_jsonl(result.dataset, ctx.out_dir / "obfuscated.jsonl");
  write_id_lines(result.attacked_ids, ctx.out_dir / "attacked_ids.txt");
  manifest.details() = {{"documents", dataset.size()},
                        {"attacked", result.attacked_ids.size()},
                        {"doc_fraction", config.doc_fraction},
                        {"char_prob", config.char_prob},
                        {"seed", config.seed},
                        {"map_entries", map.entries().size()}};
  manifest.add_output(ctx.out_dir / "obfuscated.jsonl");
  manifest.add_output(ctx.out_dir / "attacked_ids.txt");
  if (export_map) {
    atomic_write_file(fs::path(*export_map), homoglyph_map_to_json(map));
    manifest.add_output(fs::path(*export_map));
  }
  manifest.write(ctx.out_dir, "obfuscate_manifest.json");
  std::printf("obfuscate: %zu of %zu documents attacked -> %s\n",
              result.attacked_ids.size(), dataset.size(),
              (ctx.out_dir / "obfuscated.jsonl").string().c_str());
  return 0;
}

int cmd_train(const Context& ctx, const std::optional<std::string>& train_file,
              const std::optional<std::string>& validation_file) {
  const auto& taxonomy = taxonomy_for_mode(ctx.mode);
  const fs::path train_path = train_file
                                  ? fs::path(*train_file)
                                  : ctx.out_dir / "mixed_train.jsonl";
  fs::path validation_path;
  if (validation_file) {
    validation_path = fs::path(*validation_file);
  } else if (ctx.mode == "binary") {
    validation_path = configured_input(ctx, "ood", "--validation-file");
  } else {
    validation_path = ctx.out_dir / "holdout.jsonl";
  }

  const auto train_set = load_jsonl(train_path, taxonomy);
  const auto validation_set = load_jsonl(validation_path, taxonomy);
  const auto space = fit_feature_space(train_set, block_specs(ctx));
  const auto config = train_config(ctx);
  const auto result = train(train_set, validation_set, space, config);

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.history.size(); ++i) {
    if (result.history[i].validation_score >
        result.history[best].validation_score) {
      best = i;
    }
  }

  fs::create_directories(ctx.out_dir);
  Manifest manifest(ctx, "train");
  manifest.add_input(train_path);
  manifest.add_input(validation_path);
  save_feature_space(space, ctx.out_dir / "feature_space.json");
  save_classifier(result.best, ctx.out_dir / "classifier.json");

  ordered_json log;
  log["selection_metric"] = selection_metric_name(config.selection_metric);
  log["best_epoch"] = result.history[best].epoch;
  log["checkpoints"] = ordered_json::array();
  for (const auto& checkpoint : result.history) {
    log["checkpoints"].push_back(
        {{"epoch", checkpoint.epoch},
         {"validation_score", checkpoint.validation_score}});
  }
  atomic_write_file(ctx.out_dir / "checkpoints.json", log.dump(2) + "\n");

  manifest.details() = {
      {"documents", train_set.size()},
      {"validation_documents", validation_set.size()},
      {"dimension", space.dimension()},
      {"learning_rate", config.learning_rate},
      {"epochs", config.epochs},
      {"batch_size", config.batch_size},
      {"seed", config.seed},
      {"selection_metric", selection_metric_name(config.selection_metric)},
      {"best_epoch", result.history[best].epoch}};
  manifest.add_output(ctx.out_dir / "feature_space.json");
  manifest.add_output(ctx.out_dir / "classifier.json");
  manifest.add_output(ctx.out_dir / "checkpoints.json");
  manifest.write(ctx.out_dir, "train_manifest.json");
  std::printf("train: %zu features, best epoch %zu (%s %.6f)\n",
              space.dimension(), result.history[best].epoch,
              selection_metric_name(config.selection_metric),
              result.history[best].validation_score);
  return 0;
}

int cmd_predict(const Context& ctx, const std::optional<std::string>& input,
                const std::optional<std::string>& model_dir) {
  const auto& taxonomy = taxonomy_for_mode(ctx.mode);
  const fs::path model_path = model_dir ? fs::path(*model_dir) : ctx.out_dir;
  const auto space = load_feature_space(model_path / "feature_space.json");
  const auto classifier = load_classifier(model_path / "classifier.json");
  if (!(classifier.taxonomy() == taxonomy)) {
    throw UsageError("the loaded classifier uses taxonomy \"" +
                     classifier.taxonomy().name() + "\"; mode " + ctx.mode +
                     " expects \"" + taxonomy.name() + "\"");
  }

  const fs::path input_path =
      input ? fs::path(*input) : configured_input(ctx, "test", "--input");
  IngestOptions options;
  options.require_label = false;  // prediction inputs may be unlabeled
  options.allow_empty_text = true;
  const auto dataset = load_jsonl(input_path, taxonomy, options);

  fs::create_directories(ctx.out_dir);
  Manifest manifest(ctx, "predict");
  manifest.add_input(model_path / "feature_space.json");
  manifest.add_input(model_path / "classifier.json");
  manifest.add_input(input_path);

  const fs::path predictions_path = ctx.out_dir / "predictions.jsonl";
  if (ctx.mode == "binary") {
    save_scored_predictions(predict_scores(classifier, space, dataset),
                            predictions_path);
  } else {
    save_label_predictions(predict_labels(classifier, space, dataset),
                           predictions_path);
  }
  manifest.details() = {{"documents", dataset.size()}};
  manifest.add_output(predictions_path);
  manifest.write(ctx.out_dir, "predict_manifest.json");
  std::printf("predict: %zu documents -> %s\n", dataset.size(),
              predictions_path.string().c_str());
  return 0;
}

int cmd_evaluate(const Context& ctx,
                 const std::optional<std::string>& predictions,
                 const std::optional<std::string>& truth, double snap_eps,
                 const std::string& system_name) {
  const auto& taxonomy = taxonomy_for_mode(ctx.mode);
  if (!(snap_eps >= 0.0 && snap_eps < 0.5)) {
    throw UsageError("--snap-eps must be in [0, 0.5)");
  }
  const fs::path predictions_path = predictions
                                        ? fs::path(*predictions)
                                        : ctx.out_dir / "predictions.jsonl";
  const fs::path truth_path =
      truth ? fs::path(*truth) : configured_input(ctx, "test", "--truth");
  const auto truth_set = load_jsonl(truth_path, taxonomy);

  AnyReport report = BinaryReport{};
  if (ctx.mode == "binary") {
    const auto scored = load_scored_predictions(predictions_path);
    auto records = join_scored(truth_set, scored);
    records = snap_nonanswers(std::move(records), snap_eps);
    report = binary_suite(records);
  } else {
    const auto labels = load_label_predictions(predictions_path);
    const auto joined = join_labels(truth_set, labels);
    report = multiclass_suite(joined.first, joined.second, taxonomy.size());
  }

  fs::create_directories(ctx.out_dir);
  Manifest manifest(ctx, "evaluate");
  manifest.add_input(predictions_path);
  manifest.add_input(truth_path);
  save_report(report, ctx.out_dir / "report.json");

  Leaderboard board;
  board.entries.push_back(LeaderboardEntry{system_name, report});
  board.ranking_metric = ctx.mode == "binary" ? "mean" : "macro_recall";
  const auto table = render_table(board, TableFormat::markdown);
  atomic_write_file(ctx.out_dir / "report.md", table);

  manifest.details() = {{"records", truth_set.size()},
                        {"snap_eps", snap_eps},
                        {"system", system_name}};
  manifest.add_output(ctx.out_dir / "report.json");
  manifest.add_output(ctx.out_dir / "report.md");
  manifest.write(ctx.out_dir, "evaluate_manifest.json");
  std::fputs(table.c_str(), stdout);
  return 0;
}

int cmd_report(const Context& ctx, const std::vector<std::string>& entry_flags,
               const std::optional<std::string>& metric,
               const std::string& format_name,
               const std::vector<std::string>& delta_paths) {
  if (entry_flags.empty() && delta_paths.empty()) {
    throw UsageError("report needs --entry NAME=PATH or --delta CLEAN ATTACKED");
  }
  fs::create_directories(ctx.out_dir);
  Manifest manifest(ctx, "report");

  if (!entry_flags.empty()) {
    Leaderboard board;
    for (const auto& flag : entry_flags) {
      const auto separator = flag.find('=');
      if (separator == std::string::npos || separator == 0 ||
          separator + 1 == flag.size()) {
        throw UsageError("--entry expects NAME=PATH, got \"" + flag + "\"");
      }
      const fs::path path(flag.substr(separator + 1));
      board.entries.push_back(
          LeaderboardEntry{flag.substr(0, separator), load_report(path)});
      manifest.add_input(path);
    }
    if (metric) {
      const auto& binary_names = binary_metric_names();
      const auto& multiclass_names = multiclass_metric_names();
      const bool known =
          std::find(binary_names.begin(), binary_names.end(), *metric) !=
              binary_names.end() ||
          std::find(multiclass_names.begin(), multiclass_names.end(),
                    *metric) != multiclass_names.end();
      if (!known) {
        throw UsageError("unknown ranking metric \"" + *metric + "\"");
      }
      board.ranking_metric = *metric;
    } else {
      board.ranking_metric =
          std::holds_alternative<BinaryReport>(board.entries.front().report)
              ? "mean"
              : "macro_recall";
    }
    const TableFormat format = format_name == "tsv" ? TableFormat::tsv
                                                    : TableFormat::markdown;
    const auto table = render_table(board, format);
    const fs::path table_path =
        ctx.out_dir / (format == TableFormat::tsv ? "leaderboard.tsv"
                                                  : "leaderboard.md");
    atomic_write_file(table_path, table);
    manifest.add_output(table_path);
    manifest.details()["ranking_metric"] = board.ranking_metric;
    manifest.details()["entries"] = board.entries.size();
    std::fputs(table.c_str(), stdout);
  }

  if (!delta_paths.empty()) {
    const fs::path clean_path(delta_paths[0]);
    const fs::path attacked_path(delta_paths[1]);
    const auto clean = load_report(clean_path);
    const auto attacked = load_report(attacked_path);
    const auto delta = robustness_delta(clean, attacked);
    manifest.add_input(clean_path);
    manifest.add_input(attacked_path);

    ordered_json dj;
    if (const auto* binary = std::get_if<BinaryDelta>(&delta)) {
      dj["type"] = "binary";
      dj["deltas"] = {{"roc_auc", binary->roc_auc}, {"brier", binary->brier},
                      {"c_at_1", binary->c_at_1},   {"f1", binary->f1},
                      {"f05u", binary->f05u},       {"mean", binary->mean}};
    } else {
      const auto& multiclass = std::get<MulticlassDelta>(delta);
      dj["type"] = "multiclass";
      dj["deltas"] = {{"macro_recall", multiclass.macro_recall},
                      {"macro_precision", multiclass.macro_precision},
                      {"macro_f1", multiclass.macro_f1},
                      {"accuracy", multiclass.accuracy}};
    }
    atomic_write_file(ctx.out_dir / "delta.json", dj.dump(2) + "\n");
    manifest.add_output(ctx.out_dir / "delta.json");
    for (const auto& item : dj["deltas"].items()) {
      std::printf("delta %s %+.6f\n", item.key().c_str(),
                  item.value().get<double>());
    }
  }

  manifest.write(ctx.out_dir, "report_manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Machine-generated-text detection toolkit: corpus mixing, "
               "homoglyph obfuscation, TF-IDF linear detection, official "
               "metric suites, and leaderboard rendering."};
  app.require_subcommand(1);

  std::string mode = "binary";
  app.add_option("--mode", mode, "detection flow: binary or multiclass")
      ->check(CLI::IsMember({"binary", "multiclass"}));
  std::string config_flag;
  auto* config_opt =
      app.add_option("--config", config_flag, "experiment config JSON file");
  std::uint64_t seed_flag = 0;
  auto* seed_opt =
      app.add_option("--seed", seed_flag, "override every configured seed");
  std::string out_dir_flag;
  auto* out_dir_opt =
      app.add_option("--out-dir", out_dir_flag, "output directory");

  auto* mix_cmd = app.add_subcommand(
      "mix", "merge train and validation corpora; binary mode obfuscates a "
             "portion, multiclass mode extracts the balanced holdout");
  mix_cmd->fallthrough();

  auto* obfuscate_cmd = app.add_subcommand(
      "obfuscate", "apply the homoglyph attack to a corpus");
  obfuscate_cmd->fallthrough();
  std::string obfuscate_input;
  obfuscate_cmd->add_option("--input", obfuscate_input, "corpus JSONL to attack")
      ->required();
  double fraction_flag = 0.0;
  auto* fraction_opt = obfuscate_cmd->add_option(
      "--fraction", fraction_flag, "portion of documents to attack");
  double char_prob_flag = 0.0;
  auto* char_prob_opt = obfuscate_cmd->add_option(
      "--char-prob", char_prob_flag, "per-character substitution probability");
  std::string map_flag;
  auto* map_opt = obfuscate_cmd->add_option(
      "--map", map_flag, "homoglyph map JSON (default: built-in table)");
  std::string export_map_flag;
  auto* export_map_opt = obfuscate_cmd->add_option(
      "--export-map", export_map_flag, "write the active homoglyph map here");

  auto* train_cmd = app.add_subcommand(
      "train", "fit TF-IDF features and train the linear detector");
  train_cmd->fallthrough();
  std::string train_file_flag;
  auto* train_file_opt = train_cmd->add_option(
      "--train-file", train_file_flag,
      "training JSONL (default: <out-dir>/mixed_train.jsonl)");
  std::string validation_file_flag;
  auto* validation_file_opt = train_cmd->add_option(
      "--validation-file", validation_file_flag,
      "checkpoint-selection JSONL (default: config paths.ood in binary mode, "
      "<out-dir>/holdout.jsonl in multiclass mode)");

  auto* predict_cmd =
      app.add_subcommand("predict", "score or label a corpus with a trained "
                                    "model");
  predict_cmd->fallthrough();
  std::string predict_input_flag;
  auto* predict_input_opt = predict_cmd->add_option(
      "--input", predict_input_flag,
      "corpus JSONL to score (default: config paths.test)");
  std::string model_dir_flag;
  auto* model_dir_opt = predict_cmd->add_option(
      "--model-dir", model_dir_flag,
      "directory holding feature_space.json and classifier.json (default: "
      "--out-dir)");

  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "score predictions against truth with the official suite");
  evaluate_cmd->fallthrough();
  std::string predictions_flag;
  auto* predictions_opt = evaluate_cmd->add_option(
      "--predictions", predictions_flag,
      "predictions JSONL (default: <out-dir>/predictions.jsonl)");
  std::string truth_flag;
  auto* truth_opt = evaluate_cmd->add_option(
      "--truth", truth_flag, "labeled truth JSONL (default: config paths.test)");
  double snap_eps = 0.0;
  evaluate_cmd->add_option(
      "--snap-eps", snap_eps,
      "treat scores within this distance of 0.5 as non-answers");
  std::string system_name = "mgtdetect";
  evaluate_cmd->add_option("--system", system_name,
                           "system name used in the rendered table");

  auto* report_cmd = app.add_subcommand(
      "report", "render a leaderboard from saved reports, or compare a clean "
                "and an attacked report");
  report_cmd->fallthrough();
  std::vector<std::string> entry_flags;
  report_cmd
      ->add_option("--entry", entry_flags,
                   "leaderboard entry as NAME=PATH (repeatable)")
      ->type_size(1);
  std::string metric_flag;
  auto* metric_opt = report_cmd->add_option(
      "--metric", metric_flag, "ranking metric (default: mean for binary "
                               "reports, macro_recall for multiclass)");
  std::string format_flag = "markdown";
  report_cmd->add_option("--format", format_flag, "table format")
      ->check(CLI::IsMember({"markdown", "tsv"}));
  std::vector<std::string> delta_flags;
  report_cmd
      ->add_option("--delta", delta_flags,
                   "robustness delta: CLEAN_REPORT ATTACKED_REPORT")
      ->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    auto opt_string = [](const CLI::Option* option, const std::string& value)
        -> std::optional<std::string> {
      if (option->count() == 0) return std::nullopt;
      return value;
    };
    const Context ctx = make_context(
        mode, opt_string(config_opt, config_flag),
        seed_opt->count() > 0 ? std::optional<std::uint64_t>(seed_flag)
                              : std::nullopt,
        opt_string(out_dir_opt, out_dir_flag));

    if (mix_cmd->parsed()) return cmd_mix(ctx);
    if (obfuscate_cmd->parsed()) {
      return cmd_obfuscate(
          ctx, obfuscate_input,
          fraction_opt->count() > 0 ? std::optional<double>(fraction_flag)
                                    : std::nullopt,
          char_prob_opt->count() > 0 ? std::optional<double>(char_prob_flag)
                                     : std::nullopt,
          opt_string(map_opt, map_flag),
          opt_string(export_map_opt, export_map_flag));
    }
    if (train_cmd->parsed()) {
      return cmd_train(ctx, opt_string(train_file_opt, train_file_flag),
                       opt_string(validation_file_opt, validation_file_flag));
    }
    if (predict_cmd->parsed()) {
      return cmd_predict(ctx, opt_string(predict_input_opt, predict_input_flag),
                         opt_string(model_dir_opt, model_dir_flag));
    }
    if (evaluate_cmd->parsed()) {
      return cmd_evaluate(ctx, opt_string(predictions_opt, predictions_flag),
                          opt_string(truth_opt, truth_flag), snap_eps,
                          system_name);
    }
    if (report_cmd->parsed()) {
      return cmd_report(ctx, entry_flags, opt_string(metric_opt, metric_flag),
                        format_flag, delta_flags);
    }
    throw UsageError("no subcommand selected");
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}
