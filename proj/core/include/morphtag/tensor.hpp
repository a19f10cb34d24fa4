#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "morphtag/real.hpp"

namespace morphtag {

// Dense row-major tensor. Rank is small (0..2 in practice); shape {} denotes
// a scalar with one element.
struct Tensor {
  std::vector<int> shape;
  std::vector<Real> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(count(shape), Real(0)) {}
  Tensor(std::vector<int> s, std::vector<Real> d) : shape(std::move(s)), data(std::move(d)) {}

  static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
  static Tensor scalar(Real v) { return Tensor({}, {v}); }

  static int count(const std::vector<int>& s) {
    int n = 1;
    for (int d : s) n *= d;
    return n;
  }

  int size() const { return static_cast<int>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }
  bool is_scalar() const { return data.size() == 1 && shape.empty(); }

  Real& operator[](int i) { return data[static_cast<size_t>(i)]; }
  Real operator[](int i) const { return data[static_cast<size_t>(i)]; }

  // 2-D access
  Real& at(int r, int c) { return data[static_cast<size_t>(r) * shape[1] + c]; }
  Real at(int r, int c) const { return data[static_cast<size_t>(r) * shape[1] + c]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  void fill(Real v) { std::fill(data.begin(), data.end(), v); }
};

std::string shape_str(const std::vector<int>& shape);

// Named trainable weight. Gradient always mirrors the value's shape and is
// accumulated additively by Graph::backward.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)) {
    grad = Tensor::zeros(value.shape);
  }

  void zero_grad() { grad.fill(Real(0)); }
};

}  // namespace morphtag
