#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hardatt/nn.hpp"
#include "hardatt/transducer.hpp"

namespace hardatt {

// Neural state-transition system over edit actions.
//
// Action ids: 0 COPY, 1 DELETE, 2 STOP, 3 + k WRITE(k-th training character).
// The encoder reads the bare lemma; attention index i is 1-based and runs
// over [1, n+1], with a learned vector standing in for h_{n+1}.
class HaemModel final : public Transducer {
 public:
  static constexpr std::size_t kCopy = 0;
  static constexpr std::size_t kDelete = 1;
  static constexpr std::size_t kStop = 2;
  static constexpr std::size_t kFirstWrite = 3;

  HaemModel(CharVocabulary vocab, FeatureAlphabet features, ModelConfig config, std::uint64_t seed);

  Arch arch() const override { return Arch::kHaem; }
  const ModelConfig& config() const override { return config_; }
  const CharVocabulary& vocab() const override { return vocab_; }
  const FeatureAlphabet& features() const override { return features_; }
  nc::ParameterSet& params() override { return params_; }
  const nc::ParameterSet& params() const override { return params_; }
  std::size_t num_actions() const override { return kFirstWrite + vocab_.num_chars(); }

  // H + 2H + |Phi|, plus 2H for the extended variant.
  std::size_t state_input_dim() const { return state_layer_.in(); }

  std::optional<std::size_t> action_id(const Action& action) const;
  Action action_at(std::size_t id) const;

  // Multi-hot over the feature alphabet.
  nc::Tensor feature_indicator(const std::vector<std::string>& features) const;

  struct Context {
    std::u32string lemma;
    std::vector<Symbol> symbols;
    std::vector<nc::Var> encoded;  // h_1..h_n followed by the end-of-lemma vector
    nc::Var features;
  };

  struct State {
    std::size_t i = 1;
    nn::LstmState output;    // LSTM^y
    nn::LstmState history;   // LSTM^a (extended only)
    nn::LstmState deletion;  // LSTM^d (extended only)
    std::u32string emitted;
    bool stopped = false;
  };

  Context prepare(nc::Graph& graph, std::u32string_view lemma,
                  const std::vector<std::string>& features) const;
  State initial_state(nc::Graph& graph) const;

  // COPY and DELETE are valid only while i <= n.
  std::vector<bool> valid_actions(const Context& context, const State& state) const;

  struct StateOutput {
    nc::Var s;       // s_t
    nc::Var logits;  // V s_t + c
    std::vector<bool> valid;
  };
  StateOutput compute_state(nc::Graph& graph, const Context& context, const State& state,
                            const LossOptions& options = {}) const;
  // Masked softmax of compute_state's logits.
  std::vector<double> action_distribution(nc::Graph& graph, const StateOutput& output) const;

  // Throws TransitionError for an action that is invalid in `state`.
  State apply_action(nc::Graph& graph, const Context& context, const State& state,
                     std::size_t action) const;

  nc::Var sample_loss(nc::Graph& graph, const Sample& sample, const OracleSequence& oracle,
                      const LossOptions& options = {}) const override;
  DecodeResult greedy_decode(std::u32string_view lemma, const std::vector<std::string>& features,
                             const DecodeObserver& observer = {}) const override;

 private:
  CharVocabulary vocab_;
  FeatureAlphabet features_;
  ModelConfig config_;
  nc::ParameterSet params_;
  std::mt19937_64 init_rng_;
  nn::Embedding char_embedding_;
  nn::BiEncoder encoder_;
  nc::Parameter* end_of_lemma_;
  nn::LstmCell output_lstm_;
  nn::LearnedState output_init_;
  std::optional<nn::Embedding> action_embedding_;
  std::optional<nn::LstmCell> history_lstm_;
  std::optional<nn::LearnedState> history_init_;
  std::optional<nn::LstmCell> deletion_lstm_;
  std::optional<nn::LearnedState> deletion_init_;
  nn::Linear state_layer_;
  nn::Linear action_layer_;
};

}  // namespace hardatt
