#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hardatt/numcore/parameter.hpp"
#include "hardatt/numcore/tensor.hpp"

namespace hardatt::nc {

class Graph;

// Handle to a node on a Graph. Cheap to copy; only valid while the graph lives.
struct Var {
  Graph* graph = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  double scalar() const { return value()[0]; }
  std::size_t size() const { return value().size(); }
};

// A single-threaded, dynamically built reverse-mode tape. Nodes are
// appended in topological order, so backward() walks ids in reverse.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  explicit Graph(bool check_finite = true, bool track_gradients = true)
      : check_finite_(check_finite), track_gradients_(track_gradients) {}

  // Forward-only graph: no backward closures are kept.
  static Graph inference() { return Graph(true, false); }
  Graph(Graph&&) = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  // The same Parameter always maps to the same node within one graph.
  Var param(Parameter& parameter);

  // Records an op result. `parents` must already exist on this graph.
  Var record(Tensor value, std::vector<std::size_t> parents, BackwardFn backward,
             const char* op_name, bool check_finite = true);

  // Populates gradients of every reachable node; parameter gradients are
  // accumulated into Parameter::grad. May be called once per graph.
  void backward(Var loss);

  const Tensor& value(std::size_t id) const;
  // Gradient of a node after backward(); zero-shaped if unreachable.
  const Tensor& grad(Var v) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // For op implementations during backward.
  Tensor& grad_buffer(std::size_t id);
  const Tensor& upstream(std::size_t id) const { return nodes_[id].grad; }

  std::size_t size() const { return nodes_.size(); }
  bool backward_done() const { return backward_done_; }

  // Folds the sign pattern of a piecewise-linear op's input into a running
  // hash. Two forward passes with equal signatures took the same linear piece
  // everywhere, which the gradient checker uses to spot kink crossings.
  void note_kinks(const Tensor& input);
  std::uint64_t kink_signature() const { return kink_signature_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Parameter* param = nullptr;
    std::vector<std::size_t> parents;
    BackwardFn backward;
    bool requires_grad = false;
    bool touched = false;
  };

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
  bool check_finite_;
  bool track_gradients_;
  bool backward_done_ = false;
  std::uint64_t kink_signature_ = 0xcbf29ce484222325ULL;
};

}  // namespace hardatt::nc
