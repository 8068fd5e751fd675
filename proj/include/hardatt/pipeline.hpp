#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hardatt/corpus.hpp"
#include "hardatt/ensemble.hpp"
#include "hardatt/eval.hpp"
#include "hardatt/train.hpp"

namespace hardatt {

// Flat "key = value" text; '#' starts a comment. Later keys override earlier ones.
std::map<std::string, std::string> parse_key_values(std::string_view text);

struct RunManifest {
  std::string language = "lang";
  Setting setting = Setting::kLow;
  std::filesystem::path train;
  std::filesystem::path dev;
  std::filesystem::path test;
  std::filesystem::path out;
  std::optional<CellCounts> counts;  // defaults to the setting's counts
  std::uint64_t seed = 1;
  int run = 7;
  std::size_t hidden = 100;
  std::size_t embedding = 100;
  std::size_t feature_embedding = 20;
  bool extended = true;
  std::size_t epochs = 30;
  std::size_t patience = 5;
  double dropout = 0.3;
  nc::OptimizerKind optimizer = nc::OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  std::size_t jobs = 1;
  std::optional<std::filesystem::path> external;
  double external_dev_accuracy = 0.0;

  CellCounts effective_counts() const;
  PopulationConfig population() const;
};

// Relative paths are resolved against `base`.
RunManifest parse_manifest(std::string_view text, const std::filesystem::path& base = {});
RunManifest load_manifest(const std::filesystem::path& path);
// Every field, counts included; parse_manifest(render_manifest(m)) == m.
std::string render_manifest(const RunManifest& manifest);

// "lemma<TAB>prediction<TAB>features" lines.
std::string format_predictions(const Dataset& samples, const std::vector<std::u32string>& predictions);

struct RunArtifacts {
  Candidate result;
  EvalReport report;
  std::filesystem::path predictions;
};

// Writes into manifest.out:
//   pool/                 trained single models
//   predictions.tsv       test predictions of the run
//   dev_predictions.tsv   dev predictions of the run
//   report.tsv            evaluation (test when it has forms, dev otherwise)
//   manifest.txt          resolved manifest
RunArtifacts cmd_run(const RunManifest& manifest);

}  // namespace hardatt
