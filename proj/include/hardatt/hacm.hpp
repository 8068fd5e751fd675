#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hardatt/nn.hpp"
#include "hardatt/transducer.hpp"

namespace hardatt {

// Hard monotonic attention encoder-decoder whose output distribution mixes
// a generation softmax with a point mass on the attended character.
//
// Action ids: 0 STEP, 1 BOS, 2 EOS, 3 + k WRITE(k-th training character).
// The encoder reads the BOS + lemma + EOS frame, so attention index i runs
// over [0, n+1].
class HacmModel final : public Transducer {
 public:
  static constexpr std::size_t kStep = 0;
  static constexpr std::size_t kBos = 1;
  static constexpr std::size_t kEos = 2;
  static constexpr std::size_t kFirstWrite = 3;

  HacmModel(CharVocabulary vocab, FeatureAlphabet features, ModelConfig config, std::uint64_t seed);

  Arch arch() const override { return Arch::kHacm; }
  const ModelConfig& config() const override { return config_; }
  const CharVocabulary& vocab() const override { return vocab_; }
  const FeatureAlphabet& features() const override { return features_; }
  nc::ParameterSet& params() override { return params_; }
  const nc::ParameterSet& params() const override { return params_; }
  std::size_t num_actions() const override { return kFirstWrite + vocab_.num_chars(); }

  std::size_t decoder_input_dim() const;  // E + 2H + F|Phi|
  std::size_t gate_input_dim() const;     // 2H + F|Phi| + E + H

  // Inventory id of an action; nullopt for WRITE of an out-of-vocabulary
  // character or an action from the other inventory.
  std::optional<std::size_t> action_id(const Action& action) const;
  Action action_at(std::size_t id) const;

  // Per-sample encodings reused at every step.
  struct Context {
    std::vector<Symbol> frame;  // BOS, lemma symbols, EOS
    std::vector<nc::Var> encoded;
    nc::Var feature_vector;
  };

  struct State {
    std::size_t i = 0;
    nn::LstmState decoder;
    std::size_t prev_action = kBos;
  };

  // One F-sized slot per feature in alphabet order; absent slots are zero.
  nc::Var feature_vector(nc::Graph& graph, const std::vector<std::string>& features) const;
  Context prepare(nc::Graph& graph, std::u32string_view lemma,
                  const std::vector<std::string>& features) const;
  State initial_state(nc::Graph& graph) const;

  struct StepOutput {
    State state;       // decoder state after this step; i unchanged
    nc::Var s;         // s_t
    nc::Var gate_input;
  };
  // s_t = LSTM([E(a_{t-1}); h_i; f]). Throws if i is outside the frame.
  StepOutput step_state(nc::Graph& graph, const Context& context, const State& state,
                        const LossOptions& options = {}) const;

  // Applies a predicted action to the attention index and previous action.
  State advance(const State& state, std::size_t action) const;

  struct Mixture {
    std::vector<double> generation;  // P_gen over the inventory
    double gate = 1.0;               // w_gen
    std::optional<std::size_t> copy_action;
    bool attended_oov = false;
  };
  Mixture mixture_parts(nc::Graph& graph, const Context& context, const State& state,
                        const StepOutput& step) const;

  std::vector<nc::Var> encode_frame(nc::Graph& graph, const std::vector<Symbol>& frame) const;

  nc::Var sample_loss(nc::Graph& graph, const Sample& sample, const OracleSequence& oracle,
                      const LossOptions& options = {}) const override;
  DecodeResult greedy_decode(std::u32string_view lemma, const std::vector<std::string>& features,
                             const DecodeObserver& observer = {}) const override;

 private:
  std::optional<std::size_t> copy_target(const Symbol& attended, std::size_t i,
                                         std::size_t frame_size) const;

  CharVocabulary vocab_;
  FeatureAlphabet features_;
  ModelConfig config_;
  nc::ParameterSet params_;
  std::mt19937_64 init_rng_;
  nn::Embedding char_embedding_;
  nn::BiEncoder encoder_;
  nn::Embedding action_embedding_;
  nn::Embedding feature_embedding_;
  nn::LstmCell decoder_;
  nn::Linear generation_;
  nn::Linear gate_;
};

// Copy-mixture distribution over the inventory, written as the two-case
// training formula: w P_gen(a) + (1 - w) 1{a = copy}.
std::vector<double> mixture_train_form(const std::vector<double>& generation, double gate,
                                       std::optional<std::size_t> copy_action);

struct TestTimeMixture {
  std::vector<double> probs;  // over the inventory
  double oov_copy = 0.0;      // mass on copying an out-of-vocabulary character
};

// The test-time formula with indicator terms for in-vocabulary and
// out-of-vocabulary attended characters.
TestTimeMixture mixture_test_form(const std::vector<double>& generation, double gate,
                                  std::optional<std::size_t> copy_action, bool attended_oov);

}  // namespace hardatt
