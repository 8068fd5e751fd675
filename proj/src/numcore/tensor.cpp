#include "hardatt/numcore/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "hardatt/errors.hpp"

namespace hardatt::nc {

Shape::Shape(std::initializer_list<std::size_t> dims) {
  if (dims.size() < 1 || dims.size() > 2) throw NumericError("tensors must be rank 1 or 2");
  rank_ = dims.size();
  std::copy(dims.begin(), dims.end(), dims_.begin());
}

std::size_t Shape::count() const {
  if (rank_ == 0) return 0;
  return rank_ == 1 ? dims_[0] : dims_[0] * dims_[1];
}

std::string Shape::str() const {
  if (rank_ == 0) return "[]";
  if (rank_ == 1) return "[" + std::to_string(dims_[0]) + "]";
  return "[" + std::to_string(dims_[0]) + "," + std::to_string(dims_[1]) + "]";
}

bool Shape::operator==(const Shape& other) const {
  return rank_ == other.rank_ && dims_[0] == other.dims_[0] &&
         (rank_ < 2 || dims_[1] == other.dims_[1]);
}

Tensor::Tensor(Shape shape, double fill) : shape_(shape), data_(shape.count(), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(shape), data_(std::move(values)) {
  if (data_.size() != shape_.count()) {
    throw NumericError("tensor of shape " + shape_.str() + " given " +
                       std::to_string(data_.size()) + " values");
  }
}

Tensor Tensor::vector(std::vector<double> values) {
  const auto n = values.size();
  return Tensor(Shape::vector(n), std::move(values));
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace hardatt::nc
