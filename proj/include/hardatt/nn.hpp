#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hardatt/numcore/graph.hpp"
#include "hardatt/numcore/ops.hpp"
#include "hardatt/numcore/parameter.hpp"

// Layers shared by both transducers. Every layer registers its parameters
// in a caller-owned ParameterSet under "<name>.<suffix>" and holds
// references into it, so a layer must not outlive its set.
namespace hardatt::nn {

// Weights ~ U(-0.1, 0.1); biases start at zero.
inline constexpr double kInitRange = 0.1;

void init_uniform(nc::Parameter& param, std::mt19937_64& rng, double range = kInitRange);

class Embedding {
 public:
  Embedding(nc::ParameterSet& params, const std::string& name, std::size_t rows, std::size_t dim,
            std::mt19937_64& rng);

  // Throws NumericError for an id outside the table.
  nc::Var operator()(nc::Graph& graph, std::size_t id) const;

  std::size_t rows() const { return table_->value.rows(); }
  std::size_t dim() const { return table_->value.cols(); }
  nc::Parameter& table() const { return *table_; }

 private:
  nc::Parameter* table_;
};

class Linear {
 public:
  Linear(nc::ParameterSet& params, const std::string& name, std::size_t in, std::size_t out,
         std::mt19937_64& rng);

  nc::Var operator()(nc::Graph& graph, nc::Var x) const;

  std::size_t in() const { return weight_->value.cols(); }
  std::size_t out() const { return weight_->value.rows(); }
  nc::Parameter& weight() const { return *weight_; }
  nc::Parameter& bias() const { return *bias_; }

 private:
  nc::Parameter* weight_;
  nc::Parameter* bias_;
};

struct LstmState {
  nc::Var h;
  nc::Var c;
};

// Single-layer LSTM. Gates are computed as W [x; h] + b with row blocks
// ordered input, forget, output, candidate. The forget bias starts at +1.
class LstmCell {
 public:
  LstmCell(nc::ParameterSet& params, const std::string& name, std::size_t input_dim,
           std::size_t hidden, std::mt19937_64& rng);

  LstmState zero_state(nc::Graph& graph) const;
  LstmState step(nc::Graph& graph, nc::Var input, const LstmState& state) const;

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden() const { return hidden_; }
  nc::Parameter& weight() const { return *weight_; }
  nc::Parameter& bias() const { return *bias_; }

  // 4H(I + H) + 4H
  static constexpr std::size_t parameter_count(std::size_t input_dim, std::size_t hidden) {
    return 4 * hidden * (input_dim + hidden) + 4 * hidden;
  }

 private:
  std::size_t input_dim_;
  std::size_t hidden_;
  nc::Parameter* weight_;
  nc::Parameter* bias_;
};

// Trainable initial (h, c) pair for an LSTM that is restarted mid-sequence.
class LearnedState {
 public:
  LearnedState(nc::ParameterSet& params, const std::string& name, std::size_t hidden);

  LstmState operator()(nc::Graph& graph) const;

 private:
  nc::Parameter* h_;
  nc::Parameter* c_;
};

// Single-layer bidirectional LSTM; position i's output is
// [forward_h_i ; backward_h_i] of size 2H.
class BiEncoder {
 public:
  BiEncoder(nc::ParameterSet& params, const std::string& name, std::size_t input_dim,
            std::size_t hidden, std::mt19937_64& rng);

  std::vector<nc::Var> encode(nc::Graph& graph, std::span<const nc::Var> inputs) const;
  std::vector<nc::Var> encode(nc::Graph& graph, const Embedding& embedding,
                              std::span<const std::size_t> ids) const;

  std::size_t output_dim() const { return 2 * forward_.hidden(); }
  const LstmCell& forward() const { return forward_; }
  const LstmCell& backward() const { return backward_; }

 private:
  LstmCell forward_;
  LstmCell backward_;
};

}  // namespace hardatt::nn
