#include "hardatt/numcore/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hardatt::nc {
namespace {

struct Evaluation {
  double value;
  std::uint64_t kinks;
};

Evaluation evaluate(const std::function<Var(Graph&)>& loss) {
  Graph graph;
  const double value = loss(graph).scalar();
  return {value, graph.kink_signature()};
}

// Central stencils as (offset, weight) pairs: f'(x) ~ sum w * (f(x + o h) - f(x - o h)) / h.
// Differencing each symmetric pair first keeps a flat function at exactly zero.
struct Stencil {
  std::vector<double> offsets;
  std::vector<double> weights;
};

Stencil stencil_for(int order) {
  switch (order) {
    case 2:
      return {{1}, {0.5}};
    case 4:
      return {{1, 2}, {8.0 / 12, -1.0 / 12}};
    case 6:
      return {{1, 2, 3}, {45.0 / 60, -9.0 / 60, 1.0 / 60}};
    default:
      throw std::invalid_argument("grad_check: stencil must be 2, 4 or 6");
  }
}

}  // namespace

GradCheckResult grad_check(const std::function<Var(Graph&)>& loss,
                           std::span<Parameter* const> params, GradCheckOptions options) {
  const Stencil stencil = stencil_for(options.stencil);
  for (Parameter* p : params) p->grad.fill(0.0);
  std::uint64_t base_kinks;
  {
    Graph graph;
    const Var out = loss(graph);
    base_kinks = graph.kink_signature();
    graph.backward(out);
  }
  std::vector<Tensor> analytic;
  for (Parameter* p : params) {
    analytic.push_back(p->grad);
    p->grad.fill(0.0);
  }

  GradCheckResult result;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double original = p.value[k];
      double h = options.step;
      double numeric = 0.0;
      for (int attempt = 0;; ++attempt) {
        bool same_piece = true;
        double sum = 0.0;
        for (std::size_t j = 0; j < stencil.offsets.size(); ++j) {
          p.value[k] = original + stencil.offsets[j] * h;
          const Evaluation up = evaluate(loss);
          p.value[k] = original - stencil.offsets[j] * h;
          const Evaluation down = evaluate(loss);
          sum += stencil.weights[j] * (up.value - down.value);
          same_piece = same_piece && up.kinks == base_kinks && down.kinks == base_kinks;
        }
        numeric = sum / h;
        if (same_piece) break;
        if (attempt == options.kink_retries) {
          ++result.kink_unresolved;
          break;
        }
        if (attempt == 0) ++result.kink_retried;
        h /= 10;
      }
      p.value[k] = original;
      const double a = analytic[i][k];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double err = std::abs(a - numeric) / denom;
      if (++result.checked == 1 || err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_parameter = p.name;
        result.worst_index = k;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace hardatt::nc
