#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hardatt/corpus.hpp"
#include "hardatt/pool.hpp"

namespace hardatt {

// nullopt means the member abstains on that sample.
using Prediction = std::optional<std::u32string>;

// Predictions produced elsewhere (one "lemma<TAB>prediction<TAB>features"
// line per sample), joined to an ensemble as a pseudo-model.
struct ExternalPredictions {
  std::string name = "external";
  double dev_accuracy = 0.0;
  std::map<std::pair<std::u32string, std::string>, std::u32string> table;

  Prediction lookup(const Sample& sample) const;
};

ExternalPredictions load_external(const std::filesystem::path& path, double dev_accuracy);

struct Vote {
  Prediction prediction;
  double dev_accuracy = 0.0;
};

// Majority string among non-abstaining votes. A tie goes to the candidate
// backed by the highest-dev-accuracy vote, then to the earliest such vote.
// Returns nullopt only if every vote abstains.
Prediction vote(const std::vector<Vote>& votes);

struct Member {
  std::string name;
  double dev_accuracy = 0.0;
  bool external = false;
  Arch arch = Arch::kHaem;
  AlignerKind aligner = AlignerKind::kSmart;
};

// Decodes every member on dev and test once and keeps the results.
class PredictionTable {
 public:
  PredictionTable(const ModelPool& pool, const std::optional<ExternalPredictions>& external,
                  const Dataset& dev, const Dataset& test, std::size_t jobs = 1);
  // Precomputed predictions, one row per member.
  PredictionTable(std::vector<Member> members, Dataset dev, Dataset test,
                  std::vector<std::vector<Prediction>> dev_predictions,
                  std::vector<std::vector<Prediction>> test_predictions);

  const std::vector<Member>& members() const { return members_; }
  const Dataset& dev() const { return dev_; }
  const Dataset& test() const { return test_; }
  const std::vector<Prediction>& dev_predictions(std::size_t member) const { return dev_preds_.at(member); }
  const std::vector<Prediction>& test_predictions(std::size_t member) const { return test_preds_.at(member); }

  // Indices of the members of one cell, registration order.
  std::vector<std::size_t> cell(Arch arch, AlignerKind aligner) const;
  std::optional<std::size_t> external_index() const;

 private:
  std::vector<Member> members_;
  Dataset dev_;
  Dataset test_;
  std::vector<std::vector<Prediction>> dev_preds_;
  std::vector<std::vector<Prediction>> test_preds_;
};

// An evaluated ensemble: final predictions on dev and test and its dev accuracy.
struct Candidate {
  std::string label;
  std::vector<std::size_t> members;
  std::vector<std::u32string> dev;
  std::vector<std::u32string> test;
  double dev_accuracy = 0.0;
};

Candidate vote_ensemble(const PredictionTable& table, std::string label,
                        const std::vector<std::size_t>& members);

// The min(n, |members|) best members by dev accuracy, ties by position.
std::vector<std::size_t> select_n_best(const PredictionTable& table,
                                       const std::vector<std::size_t>& members, std::size_t n);

Candidate ensemble_n(const PredictionTable& table, std::string label,
                     const std::vector<std::size_t>& members, std::size_t n);

// Highest dev accuracy; ties go to the later candidate.
std::size_t max_index(const std::vector<Candidate>& candidates);
Candidate max_strategy(const std::vector<Candidate>& candidates);

inline constexpr int kNumRuns = 7;

std::string describe_run(int run);

// Composes the run from pool cells. Throws ConfigError naming an empty cell.
Candidate run_strategy(int run, const PredictionTable& table);

}  // namespace hardatt
