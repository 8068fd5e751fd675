#include "hardatt/nn.hpp"

#include <algorithm>

#include "hardatt/errors.hpp"
#include "hardatt/numcore/random.hpp"

namespace hardatt::nn {

void init_uniform(nc::Parameter& param, std::mt19937_64& rng, double range) {
  for (double& v : param.value.values()) v = nc::uniform(rng, -range, range);
}

Embedding::Embedding(nc::ParameterSet& params, const std::string& name, std::size_t rows,
                     std::size_t dim, std::mt19937_64& rng)
    : table_(&params.add(name + ".table", nc::Shape::matrix(rows, dim))) {
  init_uniform(*table_, rng);
}

nc::Var Embedding::operator()(nc::Graph& graph, std::size_t id) const {
  return nc::lookup(graph.param(*table_), id);
}

Linear::Linear(nc::ParameterSet& params, const std::string& name, std::size_t in,
               std::size_t out, std::mt19937_64& rng)
    : weight_(&params.add(name + ".W", nc::Shape::matrix(out, in))),
      bias_(&params.add(name + ".b", nc::Shape::vector(out))) {
  init_uniform(*weight_, rng);
}

nc::Var Linear::operator()(nc::Graph& graph, nc::Var x) const {
  return nc::add(nc::matmul(graph.param(*weight_), x), graph.param(*bias_));
}

LstmCell::LstmCell(nc::ParameterSet& params, const std::string& name, std::size_t input_dim,
                   std::size_t hidden, std::mt19937_64& rng)
    : input_dim_(input_dim),
      hidden_(hidden),
      weight_(&params.add(name + ".W", nc::Shape::matrix(4 * hidden, input_dim + hidden))),
      bias_(&params.add(name + ".b", nc::Shape::vector(4 * hidden))) {
  init_uniform(*weight_, rng);
  for (std::size_t k = hidden; k < 2 * hidden; ++k) bias_->value[k] = 1.0;
}

LstmState LstmCell::zero_state(nc::Graph& graph) const {
  return {graph.constant(nc::Tensor(nc::Shape::vector(hidden_))),
          graph.constant(nc::Tensor(nc::Shape::vector(hidden_)))};
}

LstmState LstmCell::step(nc::Graph& graph, nc::Var input, const LstmState& state) const {
  if (input.value().size() != input_dim_) {
    throw NumericError("lstm_step: input has " + std::to_string(input.value().size()) +
                       " values, cell expects " + std::to_string(input_dim_));
  }
  const std::size_t H = hidden_;
  nc::Var z = nc::add(nc::matmul(graph.param(*weight_), nc::concat({input, state.h})),
                      graph.param(*bias_));
  nc::Var in_gate = nc::sigmoid(nc::slice(z, 0, H));
  nc::Var forget_gate = nc::sigmoid(nc::slice(z, H, H));
  nc::Var out_gate = nc::sigmoid(nc::slice(z, 2 * H, H));
  nc::Var candidate = nc::tanh(nc::slice(z, 3 * H, H));
  nc::Var c = nc::add(nc::mul(forget_gate, state.c), nc::mul(in_gate, candidate));
  nc::Var h = nc::mul(out_gate, nc::tanh(c));
  return {h, c};
}

LearnedState::LearnedState(nc::ParameterSet& params, const std::string& name, std::size_t hidden)
    : h_(&params.add(name + ".h0", nc::Shape::vector(hidden))),
      c_(&params.add(name + ".c0", nc::Shape::vector(hidden))) {}

LstmState LearnedState::operator()(nc::Graph& graph) const {
  return {graph.param(*h_), graph.param(*c_)};
}

BiEncoder::BiEncoder(nc::ParameterSet& params, const std::string& name, std::size_t input_dim,
                     std::size_t hidden, std::mt19937_64& rng)
    : forward_(params, name + ".fwd", input_dim, hidden, rng),
      backward_(params, name + ".bwd", input_dim, hidden, rng) {}

std::vector<nc::Var> BiEncoder::encode(nc::Graph& graph, std::span<const nc::Var> inputs) const {
  if (inputs.empty()) throw NumericError("encode: empty input sequence");
  const std::size_t n = inputs.size();
  std::vector<nc::Var> fwd(n);
  std::vector<nc::Var> bwd(n);
  LstmState state = forward_.zero_state(graph);
  for (std::size_t i = 0; i < n; ++i) {
    state = forward_.step(graph, inputs[i], state);
    fwd[i] = state.h;
  }
  state = backward_.zero_state(graph);
  for (std::size_t i = n; i-- > 0;) {
    state = backward_.step(graph, inputs[i], state);
    bwd[i] = state.h;
  }
  std::vector<nc::Var> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = nc::concat({fwd[i], bwd[i]});
  return out;
}

std::vector<nc::Var> BiEncoder::encode(nc::Graph& graph, const Embedding& embedding,
                                       std::span<const std::size_t> ids) const {
  std::vector<nc::Var> inputs;
  inputs.reserve(ids.size());
  for (std::size_t id : ids) inputs.push_back(embedding(graph, id));
  return encode(graph, inputs);
}

}  // namespace hardatt::nn
