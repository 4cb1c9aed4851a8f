#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace actorflow {

// Dense row-major matrix of 64-bit reals. All graph values are rank-2;
// scalars are stored as [1,1].
struct Tensor {
  std::vector<std::size_t> shape;  // always {rows, cols}
  std::vector<double> values;

  Tensor() : shape{0, 0} {}
  Tensor(std::size_t rows, std::size_t cols)
      : shape{rows, cols}, values(rows * cols, 0.0) {}
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> v)
      : shape{rows, cols}, values(std::move(v)) {
    if (values.size() != rows * cols)
      throw std::invalid_argument("Tensor: value count " +
                                  std::to_string(values.size()) +
                                  " does not match shape [" +
                                  std::to_string(rows) + "," +
                                  std::to_string(cols) + "]");
  }

  static Tensor zeros(std::size_t rows, std::size_t cols) {
    return Tensor(rows, cols);
  }
  static Tensor full(std::size_t rows, std::size_t cols, double fill) {
    Tensor t(rows, cols);
    for (auto& v : t.values) v = fill;
    return t;
  }
  static Tensor scalar(double v) { return Tensor(1, 1, {v}); }
  static Tensor row(std::vector<double> v) {
    const std::size_t n = v.size();
    return Tensor(1, n, std::move(v));
  }
  static Tensor row(std::initializer_list<double> v) {
    return row(std::vector<double>(v));
  }

  std::size_t rows() const { return shape[0]; }
  std::size_t cols() const { return shape[1]; }
  std::size_t size() const { return values.size(); }

  double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const {
    return values[r * cols() + c];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  std::string shape_str() const {
    return "[" + std::to_string(rows()) + "," + std::to_string(cols()) + "]";
  }
};

}  // namespace actorflow
