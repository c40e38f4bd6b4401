#ifndef DEEPSTAGE_TENSOR_HPP_
#define DEEPSTAGE_TENSOR_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace deepstage {

// Dense row-major tensor of doubles. Shapes are small (vectors and weight
// matrices), so this stays a plain value type.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor vec(std::vector<double> values);

  std::size_t size() const { return data.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

  void zero();
  bool all_finite() const;
  std::string shape_str() const;
};

// Named parameter block with a gradient accumulator of identical shape.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;

  Param() = default;
  Param(std::string name_in, Tensor value_in);

  void zero_grad() { grad.zero(); }
};

}  // namespace deepstage

#endif  // DEEPSTAGE_TENSOR_HPP_
