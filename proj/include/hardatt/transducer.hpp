#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hardatt/align.hpp"
#include "hardatt/corpus.hpp"
#include "hardatt/numcore/graph.hpp"
#include "hardatt/numcore/parameter.hpp"
#include "hardatt/oracle.hpp"

namespace hardatt {

enum class Arch { kHacm, kHaem };

std::string to_string(Arch arch);
Arch parse_arch(std::string_view name);
Inventory inventory_of(Arch arch);

struct ModelConfig {
  Arch arch = Arch::kHaem;
  std::size_t hidden = 100;            // H
  std::size_t embedding = 100;         // E, characters and actions
  std::size_t feature_embedding = 20;  // F, copy-mixture model only
  bool extended = true;                // edit model: action-history and deletion LSTMs
};

enum class TerminatedBy { kEndAction, kLengthCap };

struct DecodeResult {
  std::u32string prediction;
  OracleSequence trace;
  TerminatedBy terminated_by = TerminatedBy::kEndAction;
  bool filtered = false;
};

// Extra characters a decoder may emit beyond the lemma length.
inline constexpr std::size_t kDecodeSlack = 50;

inline std::size_t decode_cap(std::size_t lemma_length) { return lemma_length + kDecodeSlack; }

// One decoding step as seen by a test observer: a probability for every
// inventory action, the validity mask, and any mass placed outside the
// inventory (copying an out-of-vocabulary character).
struct StepDistribution {
  std::vector<double> probs;
  std::vector<bool> valid;
  double outside_mass = 0.0;
  std::size_t chosen = 0;
};

using DecodeObserver = std::function<void(const StepDistribution&)>;

struct LossOptions {
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;  // required when dropout > 0
};

class Transducer {
 public:
  virtual ~Transducer() = default;

  virtual Arch arch() const = 0;
  virtual const ModelConfig& config() const = 0;
  virtual const CharVocabulary& vocab() const = 0;
  virtual const FeatureAlphabet& features() const = 0;
  virtual nc::ParameterSet& params() = 0;
  virtual const nc::ParameterSet& params() const = 0;

  // Size of the output action inventory (softmax dimension).
  virtual std::size_t num_actions() const = 0;

  // Teacher-forced negative log-likelihood of `oracle`, summed over steps.
  virtual nc::Var sample_loss(nc::Graph& graph, const Sample& sample, const OracleSequence& oracle,
                              const LossOptions& options = {}) const = 0;

  // Greedy argmax decoding, ties to the lowest action id. Not post-filtered.
  virtual DecodeResult greedy_decode(std::u32string_view lemma,
                                     const std::vector<std::string>& features,
                                     const DecodeObserver& observer = {}) const = 0;

  OracleSequence oracle(const Alignment& alignment) const;
};

}  // namespace hardatt
