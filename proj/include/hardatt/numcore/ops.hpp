#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "hardatt/numcore/graph.hpp"

// Differentiable operations on Graph nodes. Shape mismatches throw
// NumericError naming the op and both shapes.
namespace hardatt::nc {

// [m,k] x [k] -> [m];  [m,k] x [k,n] -> [m,n]
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // pointwise
Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);
// Multiplies every element of `a` by the single element of `s`.
Var scale_by(Var a, Var s);

Var concat(std::span<const Var> parts);
Var concat(std::initializer_list<Var> parts);
Var slice(Var a, std::size_t offset, std::size_t length);

Var tanh(Var a);
Var sigmoid(Var a);
Var log_sigmoid(Var a);
Var relu(Var a);
Var exp(Var a);
Var log(Var a);

// Max-subtracted. With a mask, entries where mask[k] == false get exactly
// zero probability and the remainder is renormalized.
Var softmax(Var a);
Var softmax(Var a, const std::vector<bool>& mask);
// Masked entries of the masked variant hold -infinity and receive no gradient.
Var log_softmax(Var a);
Var log_softmax(Var a, const std::vector<bool>& mask);

Var pick(Var a, std::size_t index);  // element -> scalar
Var sum(Var a);                      // -> scalar
Var sum(std::span<const Var> scalars);

// Row `row` of a [V,E] table as an [E] vector.
Var lookup(Var table, std::size_t row);

// Inverted dropout: keeps each element with probability 1 - rate, scaled by
// 1 / (1 - rate). Identity when rate == 0.
Var dropout(Var a, double rate, std::mt19937_64& rng);

}  // namespace hardatt::nc
