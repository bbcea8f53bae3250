#include "chaoswave/tensor.hpp"

#include <algorithm>
#include <utility>

#include "chaoswave/errors.hpp"

namespace chaoswave {

std::size_t shape_size(const Shape& shape) noexcept {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

std::string shape_string(const Shape& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += " x ";
    s += std::to_string(shape[i]);
  }
  return s;
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {
  for (std::size_t d : shape_) {
    if (d == 0) throw InvalidInput("Tensor: zero-sized dimension");
  }
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_size(shape_)) throw InvalidInput("Tensor: data length does not match shape");
}

void Tensor::fill(double v) { std::ranges::fill(data_, v); }

void Tensor::reshape(Shape shape) {
  if (shape_size(shape) != data_.size()) throw InvalidInput("Tensor::reshape: element count mismatch");
  shape_ = std::move(shape);
}

}  // namespace chaoswave
