#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "hardatt/align.hpp"
#include "hardatt/transducer.hpp"

namespace hardatt {

std::unique_ptr<Transducer> make_model(CharVocabulary vocab, FeatureAlphabet features,
                                       const ModelConfig& config, std::uint64_t seed);

struct CheckpointMeta {
  AlignerKind aligner = AlignerKind::kSmart;
  std::uint64_t seed = 0;
  double dev_accuracy = 0.0;
};

// Checkpoint directory layout:
//   <dir>/manifest.json  inventory tag, variant, aligner, sizes, vocabulary,
//                        feature alphabet, seed, dev accuracy
//   <dir>/params.bin     parameter file (see numcore/parameter.hpp)
void save_checkpoint(const std::filesystem::path& dir, const Transducer& model,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
  std::unique_ptr<Transducer> model;
  CheckpointMeta meta;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace hardatt
