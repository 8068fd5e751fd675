#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "hardatt/errors.hpp"
#include "hardatt/numcore/grad_check.hpp"
#include "hardatt/numcore/graph.hpp"
#include "hardatt/numcore/ops.hpp"
#include "hardatt/numcore/optimizer.hpp"
#include "hardatt/numcore/parameter.hpp"
#include "hardatt/numcore/random.hpp"
#include "support.hpp"

using namespace hardatt;
using namespace hardatt::nc;

namespace {

void randomize(Parameter& p, testing::Gen& gen, double lo = -1.0, double hi = 1.0) {
  for (auto& v : p.value.values()) v = gen.real(lo, hi);
}

// Central differences computed here, independent of grad_check.
double max_gradient_error(const std::function<Var(Graph&)>& loss, ParameterSet& params) {
  params.zero_grad();
  {
    Graph g;
    g.backward(loss(g));
  }
  double worst = 0.0;
  const double h = 1e-6;
  for (Parameter* p : params.pointers()) {
    for (std::size_t k = 0; k < p->value.size(); ++k) {
      const double saved = p->value[k];
      p->value[k] = saved + h;
      Graph gp(true, false);
      const double up = loss(gp).scalar();
      p->value[k] = saved - h;
      Graph gm(true, false);
      const double down = loss(gm).scalar();
      p->value[k] = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = p->grad[k];
      const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
      worst = std::max(worst, std::abs(numeric - analytic) / scale);
    }
  }
  params.zero_grad();
  return worst;
}

struct OpFixture {
  OpFixture() : gen(5) {
    a = &params.add("a", Shape::vector(4));
    b = &params.add("b", Shape::vector(4));
    m = &params.add("m", Shape::matrix(3, 4));
    n = &params.add("n", Shape::matrix(4, 2));
    s = &params.add("s", Shape::vector(1));
    for (Parameter* p : params.pointers()) randomize(*p, gen);
    weights = Tensor::vector({0.3, -1.2, 0.7, 2.0});
  }

  // Weighted sum so that every output element contributes a distinct slope.
  Var reduce(Graph& g, Var v) {
    std::vector<double> w(v.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = weights[k % weights.size()] + 0.1 * static_cast<double>(k);
    return sum(mul(v, g.constant(Tensor(v.value().shape(), w))));
  }

  testing::Gen gen;
  ParameterSet params;
  Parameter *a, *b, *m, *n, *s;
  Tensor weights;
};

}  // namespace

TEST_CASE("shapes and tensors") {
  CHECK(Shape::matrix(2, 3).count() == 6);
  CHECK(Shape::vector(4).str() == "[4]");
  Tensor t(Shape::matrix(2, 2), {1, 2, 3, 4});
  CHECK(t.at(1, 0) == 3);
  CHECK(t.all_finite());
  t[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(t.all_finite());
  CHECK_THROWS(Tensor(Shape::vector(3), {1.0, 2.0}));
}

TEST_CASE("forward values of elementary ops") {
  Graph g;
  Var x = g.constant(Tensor::vector({1.0, -2.0, 0.5}));
  Var y = g.constant(Tensor::vector({3.0, 4.0, -1.0}));
  CHECK(add(x, y).value() == Tensor::vector({4.0, 2.0, -0.5}));
  CHECK(mul(x, y).value() == Tensor::vector({3.0, -8.0, -0.5}));
  CHECK(relu(x).value() == Tensor::vector({1.0, 0.0, 0.5}));
  CHECK(sum(x).scalar() == doctest::Approx(-0.5));
  CHECK(concat({x, y}).size() == 6);
  CHECK(slice(concat({x, y}), 2, 2).value() == Tensor::vector({0.5, 3.0}));
  Var m = g.constant(Tensor(Shape::matrix(2, 3), {1, 0, 2, 0, 1, -1}));
  CHECK(matmul(m, y).value() == Tensor::vector({1.0, 5.0}));
  CHECK(sigmoid(g.constant(Tensor::scalar(0.0))).scalar() == 0.5);
  CHECK(log_sigmoid(g.constant(Tensor::scalar(-800.0))).scalar() == doctest::Approx(-800.0));
}

TEST_CASE("shape mismatches name the op and both shapes") {
  Graph g;
  Var x = g.constant(Tensor::vector({1.0, 2.0}));
  Var y = g.constant(Tensor::vector({1.0, 2.0, 3.0}));
  try {
    add(x, y);
    FAIL("expected a shape error");
  } catch (const NumericError& e) {
    const std::string what = e.what();
    CHECK(what.find("add") != std::string::npos);
    CHECK(what.find("[2]") != std::string::npos);
    CHECK(what.find("[3]") != std::string::npos);
  }
  Var m = g.constant(Tensor(Shape::matrix(2, 2), 1.0));
  CHECK_THROWS_AS(matmul(m, y), NumericError);
  CHECK_THROWS_AS(slice(x, 1, 5), NumericError);
}

TEST_CASE("log of zero is a numeric error when finiteness is checked") {
  Graph g;
  CHECK_THROWS_AS(nc::log(g.constant(Tensor::scalar(0.0))), NumericError);
}

TEST_CASE("softmax sums to one and masked entries are exactly zero") {
  Graph g;
  Var z = g.constant(Tensor::vector({1000.0, 999.0, -5.0, 3.0}));
  const Tensor p = softmax(z).value();
  double total = 0;
  for (double v : p.values()) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<bool> mask{false, true, true, false};
  const Tensor q = softmax(z, mask).value();
  CHECK(q[0] == 0.0);
  CHECK(q[3] == 0.0);
  CHECK(q[1] + q[2] == doctest::Approx(1.0));
  const Tensor lq = log_softmax(z, mask).value();
  CHECK(std::isinf(lq[0]));
  CHECK(lq[0] < 0);
  CHECK(std::exp(lq[1]) == doctest::Approx(q[1]));
  CHECK_THROWS_AS(softmax(z, std::vector<bool>(4, false)), NumericError);
}

TEST_CASE("cross-entropy gradient equals softmax minus one-hot") {
  ParameterSet params;
  Parameter& z = params.add("z", Shape::vector(5));
  z.value = Tensor::vector({0.2, -1.0, 2.5, 0.0, 0.3});
  Graph g;
  Var loss = scale(pick(log_softmax(g.param(z)), 2), -1.0);
  g.backward(loss);
  double denom = 0;
  for (double v : z.value.values()) denom += std::exp(v);
  for (std::size_t k = 0; k < 5; ++k) {
    const double expected = std::exp(z.value[k]) / denom - (k == 2 ? 1.0 : 0.0);
    CHECK(z.grad[k] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("every op passes a central-difference check") {
  OpFixture f;
  auto check = [&](const char* name, std::function<Var(Graph&)> build) {
    INFO(name);
    CHECK(max_gradient_error([&](Graph& g) { return f.reduce(g, build(g)); }, f.params) < 1e-6);
  };
  check("matmul vec", [&](Graph& g) { return matmul(g.param(*f.m), g.param(*f.a)); });
  check("matmul mat", [&](Graph& g) { return matmul(g.param(*f.m), g.param(*f.n)); });
  check("add", [&](Graph& g) { return add(g.param(*f.a), g.param(*f.b)); });
  check("sub", [&](Graph& g) { return sub(g.param(*f.a), g.param(*f.b)); });
  check("mul", [&](Graph& g) { return mul(g.param(*f.a), g.param(*f.b)); });
  check("scale", [&](Graph& g) { return scale(g.param(*f.a), -2.5); });
  check("add_scalar", [&](Graph& g) { return add_scalar(g.param(*f.a), 3.0); });
  check("scale_by", [&](Graph& g) { return scale_by(g.param(*f.a), g.param(*f.s)); });
  check("concat", [&](Graph& g) { return concat({g.param(*f.a), g.param(*f.b), g.param(*f.a)}); });
  check("slice", [&](Graph& g) { return slice(g.param(*f.a), 1, 2); });
  check("tanh", [&](Graph& g) { return nc::tanh(g.param(*f.a)); });
  check("sigmoid", [&](Graph& g) { return sigmoid(g.param(*f.a)); });
  check("log_sigmoid", [&](Graph& g) { return log_sigmoid(g.param(*f.a)); });
  check("exp", [&](Graph& g) { return nc::exp(g.param(*f.a)); });
  check("log", [&](Graph& g) { return nc::log(add_scalar(nc::exp(g.param(*f.a)), 0.5)); });
  check("softmax", [&](Graph& g) { return softmax(g.param(*f.a)); });
  check("log_softmax", [&](Graph& g) { return log_softmax(g.param(*f.a)); });
  check("masked softmax", [&](Graph& g) {
    return softmax(g.param(*f.a), {true, false, true, true});
  });
  check("masked log_softmax", [&](Graph& g) {
    return pick(log_softmax(g.param(*f.a), {true, false, true, true}), 2);
  });
  check("pick", [&](Graph& g) { return pick(g.param(*f.a), 3); });
  check("lookup", [&](Graph& g) { return lookup(g.param(*f.m), 1); });
  check("relu", [&](Graph& g) { return relu(g.param(*f.a)); });
  check("sum of scalars", [&](Graph& g) {
    const Var parts[] = {pick(g.param(*f.a), 0), pick(g.param(*f.b), 2)};
    return sum(std::span<const Var>(parts));
  });
}

TEST_CASE("a reused parameter accumulates both paths") {
  ParameterSet params;
  Parameter& x = params.add("x", Shape::vector(1));
  x.value[0] = 3.0;
  Graph g;
  Var v = g.param(x);
  Var w = g.param(x);
  CHECK(v.id == w.id);
  g.backward(sum(mul(v, w)));
  CHECK(x.grad[0] == doctest::Approx(6.0));
}

TEST_CASE("backward twice or on a vector is rejected") {
  ParameterSet params;
  Parameter& x = params.add("x", Shape::vector(2));
  Graph g;
  Var v = g.param(x);
  CHECK_THROWS_AS(g.backward(v), NumericError);
  Var loss = sum(v);
  g.backward(loss);
  CHECK_THROWS_AS(g.backward(loss), NumericError);
}

TEST_CASE("two-layer network gradient matches the hand derivation") {
  // y = w2 . tanh(W1 x), loss = y
  ParameterSet params;
  Parameter& w1 = params.add("w1", Shape::matrix(2, 2));
  Parameter& w2 = params.add("w2", Shape::vector(2));
  w1.value = Tensor(Shape::matrix(2, 2), {0.5, -0.3, 0.8, 0.1});
  w2.value = Tensor::vector({1.5, -2.0});
  const Tensor x = Tensor::vector({1.0, 2.0});
  Graph g;
  Var hidden = nc::tanh(matmul(g.param(w1), g.constant(x)));
  g.backward(sum(mul(g.param(w2), hidden)));
  const double a0 = std::tanh(0.5 * 1 - 0.3 * 2);
  const double a1 = std::tanh(0.8 * 1 + 0.1 * 2);
  CHECK(w2.grad[0] == doctest::Approx(a0));
  CHECK(w2.grad[1] == doctest::Approx(a1));
  CHECK(w1.grad.at(0, 1) == doctest::Approx(1.5 * (1 - a0 * a0) * 2.0));
  CHECK(w1.grad.at(1, 0) == doctest::Approx(-2.0 * (1 - a1 * a1) * 1.0));

  GradCheckResult r = grad_check(
      [&](Graph& gg) {
        return sum(mul(gg.param(w2), nc::tanh(matmul(gg.param(w1), gg.constant(x)))));
      },
      params.pointers());
  CHECK(r.checked == 6);
  CHECK(r.max_relative_error < 1e-7);
}

TEST_CASE("grad_check flags a wrong gradient") {
  ParameterSet params;
  Parameter& x = params.add("x", Shape::vector(2));
  x.value = Tensor::vector({0.4, -0.7});
  // Forward computes 2x but backward pretends the slope is 1.
  auto broken = [&](Graph& g) {
    Var v = g.param(x);
    Tensor doubled = v.value();
    for (auto& e : doubled.values()) e *= 2;
    Var out = g.record(doubled, {v.id}, [](Graph&, std::size_t) {}, "broken");
    return sum(out);
  };
  const auto r = grad_check(broken, params.pointers());
  CHECK(r.max_relative_error > 0.5);
  CHECK(r.worst_parameter == "x");
}

TEST_CASE("grad_check shrinks the step near a ReLU kink") {
  ParameterSet params;
  Parameter& w = params.add("w", Shape::vector(2));
  w.value = Tensor::vector({2e-4, -0.5});
  auto loss = [&](Graph& g) { return sum(relu(mul(g.param(w), g.constant(Tensor::vector({3.0, 1.0}))))); };
  const auto r = grad_check(loss, params.pointers(), {1e-3, 4});
  CHECK(r.kink_retried == 1);
  CHECK(r.kink_unresolved == 0);
  CHECK(r.max_relative_error < 1e-9);

  const auto blind = grad_check(loss, params.pointers(), {1e-3, 4, 0});
  CHECK(blind.kink_unresolved == 1);
  CHECK(blind.max_relative_error > 0.1);
}

TEST_CASE("every stencil agrees on a smooth function") {
  ParameterSet params;
  Parameter& w = params.add("w", Shape::vector(3));
  w.value = Tensor::vector({0.3, -1.2, 2.0});
  auto loss = [&](Graph& g) { return sum(nc::tanh(mul(g.param(w), g.param(w)))); };
  for (int stencil : {2, 4, 6}) {
    CAPTURE(stencil);
    const double step = stencil == 2 ? 1e-5 : stencil == 4 ? 1e-3 : 1e-2;
    CHECK(grad_check(loss, params.pointers(), {step, stencil}).max_relative_error < 1e-7);
  }
  CHECK_THROWS_AS(grad_check(loss, params.pointers(), {1e-3, 3}), std::invalid_argument);
}

TEST_CASE("inverted dropout keeps the mean and is identity at rate zero") {
  std::mt19937_64 rng(1);
  Graph g;
  Var x = g.constant(Tensor(Shape::vector(20000), 1.0));
  CHECK(dropout(x, 0.0, rng).value() == x.value());
  const Tensor d = dropout(x, 0.3, rng).value();
  double total = 0;
  std::size_t zeros = 0;
  for (double v : d.values()) {
    total += v;
    zeros += v == 0.0;
    CHECK((v == 0.0 || v == doctest::Approx(1.0 / 0.7)));
  }
  CHECK(total / 20000 == doctest::Approx(1.0).epsilon(0.03));
  CHECK(static_cast<double>(zeros) / 20000 == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("first Adam step moves each coordinate by the learning rate") {
  ParameterSet params;
  Parameter& x = params.add("x", Shape::vector(3));
  x.value = Tensor::vector({1.0, 2.0, 3.0});
  x.grad = Tensor::vector({0.5, -4.0, 0.0});
  Optimizer opt(params, {OptimizerKind::kAdam, 0.01, 0.0});
  opt.step();
  CHECK(x.value[0] == doctest::Approx(0.99).epsilon(1e-7));
  CHECK(x.value[1] == doctest::Approx(2.01).epsilon(1e-7));
  CHECK(x.value[2] == 3.0);
}

TEST_CASE("SGD with clipping rescales the global gradient norm") {
  ParameterSet params;
  Parameter& x = params.add("x", Shape::vector(2));
  x.grad = Tensor::vector({30.0, 40.0});  // norm 50
  Optimizer opt(params, {OptimizerKind::kSgd, 1.0, 5.0});
  opt.step();
  CHECK(x.value[0] == doctest::Approx(-3.0));
  CHECK(x.value[1] == doctest::Approx(-4.0));
  x.grad[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(opt.step(), NumericError);
}

TEST_CASE("parameter files round-trip bit-exactly and reject mismatches") {
  testing::Gen gen(8);
  ParameterSet params;
  randomize(params.add("enc.W", Shape::matrix(3, 2)), gen);
  randomize(params.add("enc.b", Shape::vector(3)), gen);
  const std::string bytes = encode_parameters(params);
  ParameterSet copy;
  copy.add("enc.W", Shape::matrix(3, 2));
  copy.add("enc.b", Shape::vector(3));
  decode_parameters(copy, bytes);
  CHECK(copy.get("enc.W").value == params.get("enc.W").value);
  CHECK(copy.get("enc.b").value == params.get("enc.b").value);
  CHECK(encode_parameters(copy) == bytes);

  ParameterSet wrong_shape;
  wrong_shape.add("enc.W", Shape::matrix(2, 3));
  wrong_shape.add("enc.b", Shape::vector(3));
  CHECK_THROWS(decode_parameters(wrong_shape, bytes));
  ParameterSet wrong_name;
  wrong_name.add("dec.W", Shape::matrix(3, 2));
  wrong_name.add("enc.b", Shape::vector(3));
  CHECK_THROWS(decode_parameters(wrong_name, bytes));
  CHECK_THROWS(decode_parameters(copy, bytes.substr(0, bytes.size() - 3)));
  CHECK_THROWS(decode_parameters(copy, "NOTPARAM" + bytes.substr(8)));
}

TEST_CASE("snapshot and restore") {
  ParameterSet params;
  Parameter& x = params.add("x", Shape::vector(2));
  x.value = Tensor::vector({1.0, 2.0});
  const auto saved = params.snapshot();
  x.value[0] = 9.0;
  params.restore(saved);
  CHECK(x.value[0] == 1.0);
  CHECK(params.scalar_count() == 2);
  CHECK_THROWS(params.add("x", Shape::vector(1)));
}

TEST_CASE("portable random helpers are reproducible") {
  std::mt19937_64 a(42), b(42);
  std::vector<int> xs{1, 2, 3, 4, 5, 6, 7}, ys = xs;
  shuffle(xs.begin(), xs.end(), a);
  shuffle(ys.begin(), ys.end(), b);
  CHECK(xs == ys);
  for (int k = 0; k < 1000; ++k) {
    const double v = uniform01(a);
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    CHECK(uniform_index(a, 3) < 3);
  }
}
