#pragma once

// Dense row-major tensor with a dynamic shape. This is deliberately minimal:
// the autograd layer and the DSP code own all the interesting math, the
// tensor only owns storage and indexing.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "clipsep/common.hpp"

namespace clipsep {

using Shape = std::vector<long>;

inline long shape_numel(const Shape& s) {
  long n = 1;
  for (long d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

template <class R>
struct Tensor {
  Shape shape;
  std::vector<R> v;

  Tensor() = default;
  explicit Tensor(Shape s) : shape(std::move(s)), v(shape_numel(shape), R(0)) {}
  Tensor(Shape s, R fill) : shape(std::move(s)), v(shape_numel(shape), fill) {}
  Tensor(Shape s, std::vector<R> data) : shape(std::move(s)), v(std::move(data)) {
    if (long(v.size()) != shape_numel(shape))
      throw InvalidInput("tensor data size does not match shape " + shape_str(shape));
  }

  static Tensor zeros(Shape s) { return Tensor(std::move(s)); }
  static Tensor full(Shape s, R value) { return Tensor(std::move(s), value); }

  long size() const { return long(v.size()); }
  int ndim() const { return int(shape.size()); }
  long dim(int i) const { return shape[std::size_t(i)]; }
  R* data() { return v.data(); }
  const R* data() const { return v.data(); }
  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  R& operator[](long i) { return v[std::size_t(i)]; }
  const R& operator[](long i) const { return v[std::size_t(i)]; }

  // Row-major element access for the common ranks.
  R& at(long i, long j) { return v[std::size_t(i * shape[1] + j)]; }
  const R& at(long i, long j) const { return v[std::size_t(i * shape[1] + j)]; }
  R& at(long i, long j, long k) {
    return v[std::size_t((i * shape[1] + j) * shape[2] + k)];
  }
  const R& at(long i, long j, long k) const {
    return v[std::size_t((i * shape[1] + j) * shape[2] + k)];
  }
  R& at(long i, long j, long k, long l) {
    return v[std::size_t(((i * shape[1] + j) * shape[2] + k) * shape[3] + l)];
  }
  const R& at(long i, long j, long k, long l) const {
    return v[std::size_t(((i * shape[1] + j) * shape[2] + k) * shape[3] + l)];
  }

  bool finite() const { return all_finite(v.data(), v.size()); }

  template <class R2>
  Tensor<R2> cast() const {
    Tensor<R2> out(shape);
    for (long i = 0; i < size(); ++i) out.v[std::size_t(i)] = R2(v[std::size_t(i)]);
    return out;
  }
};

}  // namespace clipsep
