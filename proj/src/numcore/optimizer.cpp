#include "hardatt/numcore/optimizer.hpp"

#include <cmath>

#include "hardatt/errors.hpp"

namespace hardatt::nc {

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected adam|sgd)");
}

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::kAdam ? "adam" : "sgd"; }

Optimizer::Optimizer(ParameterSet& params, OptimizerConfig config)
    : params_(params), config_(config) {
  for (const auto& p : params_.all()) {
    first_moment_.emplace_back(p->value.shape());
    second_moment_.emplace_back(p->value.shape());
  }
}

void Optimizer::step() {
  double factor = 1.0;
  if (config_.clip_norm > 0.0) {
    const double norm = params_.grad_norm();
    if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
    if (norm > config_.clip_norm) factor = config_.clip_norm / norm;
  }
  ++steps_;
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerKind::kSgd) {
    for (const auto& p : params_.all()) {
      for (std::size_t k = 0; k < p->value.size(); ++k) p->value[k] -= lr * factor * p->grad[k];
    }
    return;
  }
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double step_size = lr * std::sqrt(correction2) / correction1;
  const auto& all = params_.all();
  for (std::size_t i = 0; i < all.size(); ++i) {
    Parameter& p = *all[i];
    Tensor& m = first_moment_[i];
    Tensor& v = second_moment_[i];
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double g = p.grad[k] * factor;
      m[k] = b1 * m[k] + (1.0 - b1) * g;
      v[k] = b2 * v[k] + (1.0 - b2) * g * g;
      p.value[k] -= step_size * m[k] / (std::sqrt(v[k]) + config_.epsilon);
    }
  }
}

}  // namespace hardatt::nc
