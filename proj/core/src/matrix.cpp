#include "chaoswave/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "chaoswave/errors.hpp"

namespace chaoswave {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw InvalidInput("matrix data length does not match rows*cols");
  }
}

double max_abs_difference(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw InvalidInput("max_abs_difference: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

double sum_of_squares(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return s;
}

}  // namespace chaoswave
