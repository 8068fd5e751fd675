#include "hardatt/numcore/graph.hpp"

#include "hardatt/errors.hpp"

namespace hardatt::nc {

const Tensor& Var::value() const { return graph->value(id); }

Var Graph::constant(Tensor value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

Var Graph::param(Parameter& parameter) {
  if (auto it = param_nodes_.find(&parameter); it != param_nodes_.end()) {
    return {this, it->second};
  }
  Node node;
  node.param = &parameter;
  node.requires_grad = track_gradients_;
  nodes_.push_back(std::move(node));
  param_nodes_.emplace(&parameter, nodes_.size() - 1);
  return {this, nodes_.size() - 1};
}

Var Graph::record(Tensor value, std::vector<std::size_t> parents, BackwardFn backward,
                  const char* op_name, bool check_finite) {
  if (backward_done_) throw NumericError(std::string(op_name) + ": graph already differentiated");
  if (check_finite && check_finite_ && !value.all_finite()) {
    throw NumericError(std::string(op_name) + ": non-finite value in forward pass");
  }
  Node node;
  node.value = std::move(value);
  for (std::size_t p : parents) node.requires_grad = node.requires_grad || nodes_[p].requires_grad;
  if (node.requires_grad) {
    node.parents = std::move(parents);
    node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

const Tensor& Graph::value(std::size_t id) const {
  const auto& node = nodes_[id];
  return node.param ? node.param->value : node.value;
}

const Tensor& Graph::grad(Var v) const {
  const auto& node = nodes_[v.id];
  return node.param ? node.param->grad : node.grad;
}

Tensor& Graph::grad_buffer(std::size_t id) {
  auto& node = nodes_[id];
  node.touched = true;
  if (node.param) return node.param->grad;
  if (node.grad.empty()) node.grad = Tensor(node.value.shape());
  return node.grad;
}

void Graph::backward(Var loss) {
  if (backward_done_) throw NumericError("backward called twice on the same graph");
  if (value(loss.id).size() != 1) {
    throw NumericError("backward requires a scalar loss, got shape " +
                       value(loss.id).shape().str());
  }
  backward_done_ = true;
  if (!nodes_[loss.id].requires_grad) return;
  grad_buffer(loss.id)[0] += 1.0;
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    auto& node = nodes_[id];
    if (!node.touched || !node.backward) continue;
    node.backward(*this, id);
  }
}

void Graph::note_kinks(const Tensor& input) {
  for (std::size_t k = 0; k < input.size(); ++k) {
    kink_signature_ ^= input[k] > 0 ? 0x9e3779b97f4a7c15ULL : 0x2545f4914f6cdd1dULL;
    kink_signature_ *= 0x100000001b3ULL;
  }
}

}  // namespace hardatt::nc
