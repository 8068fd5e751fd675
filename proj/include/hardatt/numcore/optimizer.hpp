#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hardatt/numcore/parameter.hpp"

namespace hardatt::nc {

enum class OptimizerKind { kAdam, kSgd };

OptimizerKind parse_optimizer_kind(std::string_view name);
std::string to_string(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double clip_norm = 5.0;  // global gradient norm; <= 0 disables clipping
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Applies one update from the accumulated Parameter::grad values, then
// leaves the gradients untouched (callers zero them).
class Optimizer {
 public:
  Optimizer(ParameterSet& params, OptimizerConfig config);

  void step();
  const OptimizerConfig& config() const { return config_; }

 private:
  ParameterSet& params_;
  OptimizerConfig config_;
  std::vector<Tensor> first_moment_;
  std::vector<Tensor> second_moment_;
  long long steps_ = 0;
};

}  // namespace hardatt::nc
