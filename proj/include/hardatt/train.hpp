#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hardatt/align.hpp"
#include "hardatt/corpus.hpp"
#include "hardatt/numcore/optimizer.hpp"
#include "hardatt/pool.hpp"
#include "hardatt/transducer.hpp"

namespace hardatt {

enum class Setting { kLow, kMedium, kHigh };

std::string to_string(Setting setting);
Setting parse_setting(std::string_view name);

struct TrainConfig {
  nc::OptimizerConfig optimizer;
  std::size_t max_epochs = 30;
  std::size_t patience = 5;  // epochs without dev-accuracy improvement
  double dropout = 0.3;
  std::uint64_t seed = 1;
  Setting setting = Setting::kLow;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // mean per-sample loss
  double dev_accuracy = 0.0;
};

std::string to_json_line(const EpochRecord& record);

struct TrainResult {
  std::unique_ptr<Transducer> model;  // parameters of the best dev epoch
  double best_dev_accuracy = 0.0;
  std::size_t best_epoch = 0;
  std::vector<EpochRecord> log;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

std::vector<OracleSequence> compute_oracles(Arch arch, AlignerKind aligner, const Dataset& samples);

double dev_accuracy(const Transducer& model, const Dataset& dev);

// Trains a fresh model; the vocabulary and feature alphabet come from `train`.
TrainResult train_model(const ModelConfig& model_config, AlignerKind aligner, const Dataset& train,
                        const Dataset& dev, const TrainConfig& config,
                        const EpochCallback& on_epoch = {});

// Continues training an existing model.
TrainResult train_existing(std::unique_ptr<Transducer> model, AlignerKind aligner,
                           const Dataset& train, const Dataset& dev, const TrainConfig& config,
                           const EpochCallback& on_epoch = {});

// Models per cell, in the order HACM-naive, HACM-smart, HAEM-naive, HAEM-smart.
struct CellCounts {
  std::array<std::size_t, 4> counts{};

  std::size_t& at(Arch arch, AlignerKind aligner);
  std::size_t at(Arch arch, AlignerKind aligner) const;
  std::size_t total() const;
};

CellCounts default_counts(Setting setting);

struct PopulationConfig {
  CellCounts counts;
  TrainConfig train;
  ModelConfig hacm{Arch::kHacm};
  ModelConfig haem{Arch::kHaem};
  std::size_t jobs = 1;
};

// Seed of the k-th model of a cell.
std::uint64_t member_seed(std::uint64_t base, Arch arch, AlignerKind aligner, std::size_t k);

// Trains every cell member; entries are registered in cell order, then by k,
// regardless of the number of parallel jobs.
ModelPool train_population(const Dataset& train, const Dataset& dev, const PopulationConfig& config);

}  // namespace hardatt
