#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "hardatt/numcore/graph.hpp"

namespace hardatt::nc {

struct GradCheckOptions {
  double step = 1e-5;
  // 2: (f(x+h) - f(x-h)) / 2h.  4: five-point stencil.  6: seven-point stencil.
  int stencil = 2;
  // When a stencil point lands on a different ReLU piece than the unperturbed
  // input, the step is divided by 10 and the element retried, at most this
  // many times.
  int kink_retries = 4;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
  // Elements whose step had to shrink to stay on one linear piece.
  std::size_t kink_retried = 0;
  // Elements that still straddled a kink after every retry.
  std::size_t kink_unresolved = 0;
};

// `loss` builds a scalar loss on the given graph from the current parameter
// values; it must be deterministic. Compares backward() against central
// differences for every element of `params`, using
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
// Parameter gradients are zeroed before and after.
GradCheckResult grad_check(const std::function<Var(Graph&)>& loss,
                           std::span<Parameter* const> params,
                           GradCheckOptions options = {});

}  // namespace hardatt::nc
