#include <doctest.h>

#include <cmath>

#include "hardatt/errors.hpp"
#include "hardatt/nn.hpp"
#include "hardatt/numcore/grad_check.hpp"
#include "support.hpp"

using namespace hardatt;
using namespace hardatt::nc;

namespace {

double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Reference LSTM step written with plain loops: gates i, f, o, g from
// W [x; h] + b.
void reference_step(const Tensor& W, const Tensor& b, const std::vector<double>& x,
                    std::vector<double>& h, std::vector<double>& c) {
  const std::size_t H = h.size();
  std::vector<double> xh(x);
  xh.insert(xh.end(), h.begin(), h.end());
  std::vector<double> z(4 * H);
  for (std::size_t r = 0; r < 4 * H; ++r) {
    z[r] = b[r];
    for (std::size_t k = 0; k < xh.size(); ++k) z[r] += W.at(r, k) * xh[k];
  }
  for (std::size_t j = 0; j < H; ++j) {
    const double in = sigm(z[j]), forget = sigm(z[H + j]), out = sigm(z[2 * H + j]), cand = std::tanh(z[3 * H + j]);
    c[j] = forget * c[j] + in * cand;
    h[j] = out * std::tanh(c[j]);
  }
}

}  // namespace

TEST_CASE("LSTM parameter count follows 4H(I+H)+4H") {
  std::mt19937_64 rng(1);
  for (auto [in, hidden] : {std::pair<std::size_t, std::size_t>{3, 2}, {10, 7}, {1, 1}}) {
    ParameterSet params;
    nn::LstmCell cell(params, "lstm", in, hidden, rng);
    CHECK(params.scalar_count() == 4 * hidden * (in + hidden) + 4 * hidden);
    CHECK(nn::LstmCell::parameter_count(in, hidden) == params.scalar_count());
  }
}

TEST_CASE("forget gate bias starts at one, other biases at zero") {
  std::mt19937_64 rng(1);
  ParameterSet params;
  nn::LstmCell cell(params, "lstm", 2, 3, rng);
  for (std::size_t r = 0; r < 12; ++r) CHECK(cell.bias().value[r] == (r >= 3 && r < 6 ? 1.0 : 0.0));
  for (double w : cell.weight().value.values()) {
    CHECK(w >= -0.1);
    CHECK(w <= 0.1);
  }
}

TEST_CASE("LSTM step matches a loop-based reference over a sequence") {
  std::mt19937_64 rng(2);
  ParameterSet params;
  nn::LstmCell cell(params, "lstm", 3, 4, rng);
  testing::Gen gen(3);
  for (auto& v : cell.bias().value.values()) v = gen.real(-0.5, 0.5);
  std::vector<double> h(4, 0.0), c(4, 0.0);
  Graph g;
  nn::LstmState state = cell.zero_state(g);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> x{gen.real(-1, 1), gen.real(-1, 1), gen.real(-1, 1)};
    state = cell.step(g, g.constant(Tensor::vector(x)), state);
    reference_step(cell.weight().value, cell.bias().value, x, h, c);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(state.h.value()[j] == doctest::Approx(h[j]).epsilon(1e-12));
      CHECK(state.c.value()[j] == doctest::Approx(c[j]).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(cell.step(g, g.constant(Tensor::vector({1.0})), state), NumericError);
}

TEST_CASE("LSTM over a sequence passes a gradient check") {
  std::mt19937_64 rng(4);
  ParameterSet params;
  nn::LstmCell cell(params, "lstm", 2, 3, rng);
  nn::Embedding emb(params, "emb", 4, 2, rng);
  nn::LearnedState init(params, "init", 3);
  testing::Gen gen(5);
  for (auto& v : params.get("init.h0").value.values()) v = gen.real(-0.3, 0.3);
  const std::vector<std::size_t> ids{0, 3, 1, 1, 2};
  auto loss = [&](Graph& g) {
    nn::LstmState s = init(g);
    for (auto id : ids) s = cell.step(g, emb(g, id), s);
    return sum(mul(s.h, s.c));
  };
  const auto r = grad_check(loss, params.pointers(), {1e-5, 4});
  CHECK(r.max_relative_error < 1e-6);
  CHECK(r.checked == params.scalar_count());
}

TEST_CASE("bidirectional encoder wiring") {
  std::mt19937_64 rng(6);
  ParameterSet params;
  nn::Embedding emb(params, "emb", 5, 3, rng);
  nn::BiEncoder enc(params, "enc", 3, 4, rng);
  CHECK(enc.output_dim() == 8);
  const std::vector<std::size_t> base{1, 2, 3, 4};
  std::vector<std::size_t> changed_last = base;
  changed_last.back() = 0;
  std::vector<std::size_t> changed_first = base;
  changed_first.front() = 0;

  Graph g;
  const auto a = enc.encode(g, emb, base);
  const auto b = enc.encode(g, emb, changed_last);
  const auto c = enc.encode(g, emb, changed_first);
  REQUIRE(a.size() == 4);
  auto half = [](const Var& v, bool forward) {
    const auto vals = v.value().values();
    return std::vector<double>(forward ? vals.begin() : vals.begin() + 4, forward ? vals.begin() + 4 : vals.end());
  };
  // Changing the last input leaves every earlier forward state untouched
  // but reaches the backward state of the first position.
  for (std::size_t i = 0; i + 1 < 4; ++i) CHECK(half(a[i], true) == half(b[i], true));
  CHECK(half(a[0], false) != half(b[0], false));
  // And symmetrically for the first input.
  for (std::size_t i = 1; i < 4; ++i) CHECK(half(a[i], false) == half(c[i], false));
  CHECK(half(a[3], true) != half(c[3], true));
}

TEST_CASE("embedding rejects ids outside the table") {
  std::mt19937_64 rng(7);
  ParameterSet params;
  nn::Embedding emb(params, "emb", 3, 2, rng);
  Graph g;
  CHECK(emb(g, 2).size() == 2);
  CHECK_THROWS_AS(emb(g, 3), NumericError);
}

TEST_CASE("layer initialization is seed-determined") {
  auto build = [](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ParameterSet params;
    nn::Linear layer(params, "lin", 3, 2, rng);
    return layer.weight().value;
  };
  CHECK(build(9) == build(9));
  CHECK_FALSE(build(9) == build(10));
}
