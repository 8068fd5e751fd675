#include "hardatt/numcore/ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "hardatt/errors.hpp"
#include "hardatt/numcore/random.hpp"

namespace hardatt::nc {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

ConstVecMap vec(const Tensor& t) { return ConstVecMap(t.data(), static_cast<Eigen::Index>(t.size())); }
VecMap vec(Tensor& t) { return VecMap(t.data(), static_cast<Eigen::Index>(t.size())); }
ConstMatMap mat(const Tensor& t) {
  return ConstMatMap(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}
MatMap mat(Tensor& t) {
  return MatMap(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw NumericError(std::string(op) + ": incompatible shapes " + a.str() + " and " + b.str());
}

void require_same(const char* op, Var a, Var b) {
  if (a.graph != b.graph) throw NumericError(std::string(op) + ": operands on different graphs");
  if (!(a.value().shape() == b.value().shape())) shape_error(op, a.value().shape(), b.value().shape());
}

void require_vector(const char* op, Var a) {
  if (a.value().shape().rank() != 1) {
    throw NumericError(std::string(op) + ": expected a vector, got " + a.value().shape().str());
  }
}

// Applies a pointwise function with derivative expressed via input x and output y.
template <typename F, typename D>
Var unary(Var a, const char* name, F f, D dfdx) {
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = f(x[k]);
  const std::size_t pa = a.id;
  return a.graph->record(std::move(y), {pa},
                         [pa, dfdx](Graph& g, std::size_t self) {
                           if (!g.requires_grad(pa)) return;
                           const Tensor& x = g.value(pa);
                           const Tensor& y = g.value(self);
                           const Tensor& up = g.upstream(self);
                           Tensor& gx = g.grad_buffer(pa);
                           for (std::size_t k = 0; k < x.size(); ++k) gx[k] += up[k] * dfdx(x[k], y[k]);
                         },
                         name);
}

}  // namespace

Var matmul(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.shape().rank() != 2 || A.cols() != B.rows() || a.graph != b.graph) {
    shape_error("matmul", A.shape(), B.shape());
  }
  const bool b_is_vector = B.shape().rank() == 1;
  Tensor out(b_is_vector ? Shape::vector(A.rows()) : Shape::matrix(A.rows(), B.cols()));
  if (b_is_vector) {
    vec(out).noalias() = mat(A) * vec(B);
  } else {
    mat(out).noalias() = mat(A) * mat(B);
  }
  const std::size_t pa = a.id;
  const std::size_t pb = b.id;
  return a.graph->record(
      std::move(out), {pa, pb},
      [pa, pb, b_is_vector](Graph& g, std::size_t self) {
        const Tensor& up = g.upstream(self);
        if (b_is_vector) {
          if (g.requires_grad(pa)) {
            mat(g.grad_buffer(pa)).noalias() += vec(up) * vec(g.value(pb)).transpose();
          }
          if (g.requires_grad(pb)) {
            vec(g.grad_buffer(pb)).noalias() += mat(g.value(pa)).transpose() * vec(up);
          }
        } else {
          if (g.requires_grad(pa)) {
            mat(g.grad_buffer(pa)).noalias() += mat(up) * mat(g.value(pb)).transpose();
          }
          if (g.requires_grad(pb)) {
            mat(g.grad_buffer(pb)).noalias() += mat(g.value(pa)).transpose() * mat(up);
          }
        }
      },
      "matmul");
}

Var add(Var a, Var b) {
  require_same("add", a, b);
  Tensor out = a.value();
  vec(out) += vec(b.value());
  const std::size_t pa = a.id, pb = b.id;
  return a.graph->record(std::move(out), {pa, pb},
                         [pa, pb](Graph& g, std::size_t self) {
                           const Tensor& up = g.upstream(self);
                           if (g.requires_grad(pa)) vec(g.grad_buffer(pa)) += vec(up);
                           if (g.requires_grad(pb)) vec(g.grad_buffer(pb)) += vec(up);
                         },
                         "add");
}

Var sub(Var a, Var b) {
  require_same("sub", a, b);
  Tensor out = a.value();
  vec(out) -= vec(b.value());
  const std::size_t pa = a.id, pb = b.id;
  return a.graph->record(std::move(out), {pa, pb},
                         [pa, pb](Graph& g, std::size_t self) {
                           const Tensor& up = g.upstream(self);
                           if (g.requires_grad(pa)) vec(g.grad_buffer(pa)) += vec(up);
                           if (g.requires_grad(pb)) vec(g.grad_buffer(pb)) -= vec(up);
                         },
                         "sub");
}

Var mul(Var a, Var b) {
  require_same("mul", a, b);
  Tensor out = a.value();
  vec(out).array() *= vec(b.value()).array();
  const std::size_t pa = a.id, pb = b.id;
  return a.graph->record(
      std::move(out), {pa, pb},
      [pa, pb](Graph& g, std::size_t self) {
        const Tensor& up = g.upstream(self);
        if (g.requires_grad(pa)) vec(g.grad_buffer(pa)).array() += vec(up).array() * vec(g.value(pb)).array();
        if (g.requires_grad(pb)) vec(g.grad_buffer(pb)).array() += vec(up).array() * vec(g.value(pa)).array();
      },
      "mul");
}

Var scale(Var a, double factor) {
  Tensor out = a.value();
  vec(out) *= factor;
  const std::size_t pa = a.id;
  return a.graph->record(std::move(out), {pa},
                         [pa, factor](Graph& g, std::size_t self) {
                           if (g.requires_grad(pa)) vec(g.grad_buffer(pa)) += factor * vec(g.upstream(self));
                         },
                         "scale");
}

Var add_scalar(Var a, double offset) {
  Tensor out = a.value();
  vec(out).array() += offset;
  const std::size_t pa = a.id;
  return a.graph->record(std::move(out), {pa},
                         [pa](Graph& g, std::size_t self) {
                           if (g.requires_grad(pa)) vec(g.grad_buffer(pa)) += vec(g.upstream(self));
                         },
                         "add_scalar");
}

Var scale_by(Var a, Var s) {
  if (s.value().size() != 1 || a.graph != s.graph) shape_error("scale_by", a.value().shape(), s.value().shape());
  Tensor out = a.value();
  vec(out) *= s.scalar();
  const std::size_t pa = a.id, ps = s.id;
  return a.graph->record(std::move(out), {pa, ps},
                         [pa, ps](Graph& g, std::size_t self) {
                           const Tensor& up = g.upstream(self);
                           if (g.requires_grad(pa)) vec(g.grad_buffer(pa)) += g.value(ps)[0] * vec(up);
                           if (g.requires_grad(ps)) g.grad_buffer(ps)[0] += vec(up).dot(vec(g.value(pa)));
                         },
                         "scale_by");
}

Var concat(std::initializer_list<Var> parts) {
  return concat(std::span<const Var>(parts.begin(), parts.size()));
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw NumericError("concat: no operands");
  Graph* graph = parts.front().graph;
  std::size_t total = 0;
  std::vector<std::size_t> parents;
  parents.reserve(parts.size());
  for (const Var& part : parts) {
    require_vector("concat", part);
    if (part.graph != graph) throw NumericError("concat: operands on different graphs");
    total += part.value().size();
    parents.push_back(part.id);
  }
  Tensor out(Shape::vector(total));
  std::size_t offset = 0;
  for (const Var& part : parts) {
    const Tensor& v = part.value();
    std::copy(v.data(), v.data() + v.size(), out.data() + offset);
    offset += v.size();
  }
  auto ids = parents;
  return graph->record(std::move(out), std::move(parents),
                       [ids](Graph& g, std::size_t self) {
                         const Tensor& up = g.upstream(self);
                         std::size_t offset = 0;
                         for (std::size_t id : ids) {
                           const std::size_t n = g.value(id).size();
                           if (g.requires_grad(id)) {
                             Tensor& gi = g.grad_buffer(id);
                             for (std::size_t k = 0; k < n; ++k) gi[k] += up[offset + k];
                           }
                           offset += n;
                         }
                       },
                       "concat");
}

Var slice(Var a, std::size_t offset, std::size_t length) {
  require_vector("slice", a);
  const Tensor& x = a.value();
  if (offset + length > x.size()) {
    throw NumericError("slice: range [" + std::to_string(offset) + "," + std::to_string(offset + length) +
                       ") out of bounds for shape " + x.shape().str());
  }
  Tensor out(Shape::vector(length));
  std::copy(x.data() + offset, x.data() + offset + length, out.data());
  const std::size_t pa = a.id;
  return a.graph->record(std::move(out), {pa},
                         [pa, offset, length](Graph& g, std::size_t self) {
                           if (!g.requires_grad(pa)) return;
                           const Tensor& up = g.upstream(self);
                           Tensor& ga = g.grad_buffer(pa);
                           for (std::size_t k = 0; k < length; ++k) ga[offset + k] += up[k];
                         },
                         "slice");
}

Var tanh(Var a) {
  return unary(a, "tanh", [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  return unary(a, "sigmoid", [](double x) { return stable_sigmoid(x); },
               [](double, double y) { return y * (1.0 - y); });
}

Var log_sigmoid(Var a) {
  // log(sigmoid(x)) = -softplus(-x); derivative is sigmoid(-x).
  return unary(a, "log_sigmoid",
               [](double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); },
               [](double x, double) { return stable_sigmoid(-x); });
}

Var relu(Var a) {
  a.graph->note_kinks(a.value());
  return unary(a, "relu", [](double x) { return x > 0 ? x : 0.0; },
               [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Var exp(Var a) {
  return unary(a, "exp", [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(Var a) {
  return unary(a, "log", [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

namespace {

std::vector<bool> all_valid(std::size_t n) { return std::vector<bool>(n, true); }

void check_mask(const char* op, const Tensor& x, const std::vector<bool>& mask) {
  if (mask.size() != x.size()) {
    throw NumericError(std::string(op) + ": mask of length " + std::to_string(mask.size()) +
                       " for shape " + x.shape().str());
  }
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
    throw NumericError(std::string(op) + ": every entry is masked");
  }
}

// Returns max over valid entries and log of the normalizer relative to it.
std::pair<double, double> log_normalizer(const Tensor& x, const std::vector<bool>& mask) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (mask[k]) mx = std::max(mx, x[k]);
  }
  double z = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (mask[k]) z += std::exp(x[k] - mx);
  }
  return {mx, std::log(z)};
}

}  // namespace

Var softmax(Var a) { return softmax(a, all_valid(a.value().size())); }

Var softmax(Var a, const std::vector<bool>& mask) {
  require_vector("softmax", a);
  const Tensor& x = a.value();
  check_mask("softmax", x, mask);
  const auto [mx, log_z] = log_normalizer(x, mask);
  Tensor p(x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) p[k] = mask[k] ? std::exp(x[k] - mx - log_z) : 0.0;
  const std::size_t pa = a.id;
  return a.graph->record(std::move(p), {pa},
                         [pa](Graph& g, std::size_t self) {
                           if (!g.requires_grad(pa)) return;
                           const Tensor& p = g.value(self);
                           const Tensor& up = g.upstream(self);
                           const double dot = vec(p).dot(vec(up));
                           Tensor& ga = g.grad_buffer(pa);
                           for (std::size_t k = 0; k < p.size(); ++k) ga[k] += p[k] * (up[k] - dot);
                         },
                         "softmax");
}

Var log_softmax(Var a) { return log_softmax(a, all_valid(a.value().size())); }

Var log_softmax(Var a, const std::vector<bool>& mask) {
  require_vector("log_softmax", a);
  const Tensor& x = a.value();
  check_mask("log_softmax", x, mask);
  const auto [mx, log_z] = log_normalizer(x, mask);
  Tensor out(x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = mask[k] ? x[k] - mx - log_z : -std::numeric_limits<double>::infinity();
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (mask[k] && !std::isfinite(out[k])) throw NumericError("log_softmax: non-finite value in forward pass");
  }
  const std::size_t pa = a.id;
  // Masked entries are -inf on purpose; valid entries were checked above.
  return a.graph->record(std::move(out), {pa},
                      [pa, mask](Graph& g, std::size_t self) {
                        if (!g.requires_grad(pa)) return;
                        const Tensor& y = g.value(self);
                        const Tensor& up = g.upstream(self);
                        double total = 0.0;
                        for (std::size_t k = 0; k < y.size(); ++k) {
                          if (mask[k]) total += up[k];
                        }
                        Tensor& ga = g.grad_buffer(pa);
                        for (std::size_t k = 0; k < y.size(); ++k) {
                          if (mask[k]) ga[k] += up[k] - std::exp(y[k]) * total;
                        }
                      },
                      "log_softmax", /*check_finite=*/false);
}

Var pick(Var a, std::size_t index) {
  const Tensor& x = a.value();
  if (index >= x.size()) {
    throw NumericError("pick: index " + std::to_string(index) + " out of range for " + x.shape().str());
  }
  const std::size_t pa = a.id;
  return a.graph->record(Tensor::scalar(x[index]), {pa},
                         [pa, index](Graph& g, std::size_t self) {
                           if (g.requires_grad(pa)) g.grad_buffer(pa)[index] += g.upstream(self)[0];
                         },
                         "pick");
}

Var sum(Var a) {
  const std::size_t pa = a.id;
  return a.graph->record(Tensor::scalar(vec(a.value()).sum()), {pa},
                         [pa](Graph& g, std::size_t self) {
                           if (g.requires_grad(pa)) vec(g.grad_buffer(pa)).array() += g.upstream(self)[0];
                         },
                         "sum");
}

Var sum(std::span<const Var> scalars) {
  if (scalars.empty()) throw NumericError("sum: no operands");
  Graph* graph = scalars.front().graph;
  std::vector<std::size_t> parents;
  double total = 0.0;
  for (const Var& s : scalars) {
    if (s.value().size() != 1) throw NumericError("sum: expected scalars, got " + s.value().shape().str());
    total += s.scalar();
    parents.push_back(s.id);
  }
  auto ids = parents;
  return graph->record(Tensor::scalar(total), std::move(parents),
                       [ids](Graph& g, std::size_t self) {
                         const double up = g.upstream(self)[0];
                         for (std::size_t id : ids) {
                           if (g.requires_grad(id)) g.grad_buffer(id)[0] += up;
                         }
                       },
                       "sum");
}

Var lookup(Var table, std::size_t row) {
  const Tensor& t = table.value();
  if (t.shape().rank() != 2) throw NumericError("lookup: table must be a matrix, got " + t.shape().str());
  if (row >= t.rows()) {
    throw NumericError("lookup: id " + std::to_string(row) + " out of range for table " + t.shape().str());
  }
  const std::size_t width = t.cols();
  Tensor out(Shape::vector(width));
  std::copy(t.data() + row * width, t.data() + (row + 1) * width, out.data());
  const std::size_t pt = table.id;
  return table.graph->record(std::move(out), {pt},
                             [pt, row, width](Graph& g, std::size_t self) {
                               if (!g.requires_grad(pt)) return;
                               const Tensor& up = g.upstream(self);
                               Tensor& gt = g.grad_buffer(pt);
                               for (std::size_t k = 0; k < width; ++k) gt[row * width + k] += up[k];
                             },
                             "lookup");
}

Var dropout(Var a, double rate, std::mt19937_64& rng) {
  if (rate <= 0.0) return a;
  if (rate >= 1.0) throw NumericError("dropout: rate must be < 1");
  const Tensor& x = a.value();
  auto mask = std::make_shared<std::vector<double>>(x.size());
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor out(x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) {
    (*mask)[k] = uniform01(rng) >= rate ? keep_scale : 0.0;
    out[k] = x[k] * (*mask)[k];
  }
  const std::size_t pa = a.id;
  return a.graph->record(std::move(out), {pa},
                         [pa, mask](Graph& g, std::size_t self) {
                           if (!g.requires_grad(pa)) return;
                           const Tensor& up = g.upstream(self);
                           Tensor& ga = g.grad_buffer(pa);
                           for (std::size_t k = 0; k < up.size(); ++k) ga[k] += up[k] * (*mask)[k];
                         },
                         "dropout");
}

}  // namespace hardatt::nc
