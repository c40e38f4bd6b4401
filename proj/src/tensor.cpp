#include "deepstage/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "deepstage/util.hpp"

namespace deepstage {

namespace {
std::size_t product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in)
    : shape(std::move(shape_in)), data(std::move(data_in)) {
  if (product(shape) != data.size())
    fail("tensor shape/data mismatch: shape ", shape_str(), " holds ",
         product(shape), " values, got ", data.size());
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  Tensor t;
  t.data.assign(product(shape), 0.0);
  t.shape = std::move(shape);
  return t;
}

Tensor Tensor::vec(std::vector<double> values) {
  Tensor t;
  t.shape = {values.size()};
  t.data = std::move(values);
  return t;
}

void Tensor::zero() { std::fill(data.begin(), data.end(), 0.0); }

bool Tensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Param::Param(std::string name_in, Tensor value_in)
    : name(std::move(name_in)),
      value(std::move(value_in)),
      grad(Tensor::zeros(value.shape)) {}

}  // namespace deepstage
