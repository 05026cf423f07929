#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "gridfft/errors.hpp"

namespace gridfft {

using cplx = std::complex<double>;

/// Extents of a dense multi-dimensional array. Mode 0 is the fastest-varying
/// dimension; every tensor in this library is stored column-major.
class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<std::int64_t> extents);
  explicit Shape(std::vector<std::int64_t> extents);

  int order() const { return static_cast<int>(extents_.size()); }
  std::int64_t count() const;
  std::int64_t operator[](int mode) const;
  const std::vector<std::int64_t>& extents() const { return extents_; }

  bool operator==(const Shape&) const = default;

  /// e.g. "4x8x16"; scalar (order-0) prints as "scalar".
  std::string str() const;

 private:
  std::vector<std::int64_t> extents_;
};

/// Column-major offset of a multi-index; IndexOutOfBounds when any component
/// leaves its mode. Enumerating all indices yields each of 0..count-1 once.
std::int64_t linearize(std::span<const std::int64_t> index, const Shape& shape);
std::vector<std::int64_t> delinearize(std::int64_t offset, const Shape& shape);

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);  // zero-filled
  Tensor(Shape shape, std::vector<cplx> data);

  const Shape& shape() const { return shape_; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
  std::span<const cplx> data() const { return data_; }
  std::span<cplx> data() { return data_; }
  std::vector<cplx> take_data() && { return std::move(data_); }

  cplx at(std::span<const std::int64_t> index) const;
  cplx& at(std::span<const std::int64_t> index);

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_;
  std::vector<cplx> data_;
};

/// Reinterpret the flat buffer under a new shape with the same element count.
Tensor reshape(const Tensor& t, Shape shape);

/// Replace mode by the pair (inner, extent/inner); the flat data is untouched.
Tensor split_mode(const Tensor& t, int mode, std::int64_t inner);

/// Merge mode and mode+1 back into one extent; inverse of split_mode.
Tensor merge_modes(const Tensor& t, int mode);

/// out[(i_perm(0), i_perm(1), ...)] = t[(i_0, i_1, ...)]; materializes a new
/// contiguous tensor.
Tensor transpose(const Tensor& t, std::span<const int> perm);

/// Elementwise complex product; shapes must match.
Tensor pointwise_mul(const Tensor& a, const Tensor& b);

}  // namespace gridfft
