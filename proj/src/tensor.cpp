#include "gridfft/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace gridfft {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::IndexOutOfBounds: return "IndexOutOfBounds";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::InvalidPermutation: return "InvalidPermutation";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidMode: return "InvalidMode";
    case Errc::ParseError: return "ParseError";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::InvalidRoot: return "InvalidRoot";
    case Errc::DeadlockDetected: return "DeadlockDetected";
    case Errc::ProgramError: return "ProgramError";
    case Errc::UnsupportedRedist: return "UnsupportedRedist";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::UnsupportedAlgorithm: return "UnsupportedAlgorithm";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::UnsupportedCount: return "UnsupportedCount";
    case Errc::NoFeasibleConfiguration: return "NoFeasibleConfiguration";
  }
  return "Error";
}

Shape::Shape(std::initializer_list<std::int64_t> extents)
    : Shape(std::vector<std::int64_t>(extents)) {}

Shape::Shape(std::vector<std::int64_t> extents) : extents_(std::move(extents)) {
  for (std::size_t m = 0; m < extents_.size(); ++m) {
    if (extents_[m] < 1) {
      fail(Errc::ShapeMismatch,
           "mode " + std::to_string(m) + " has extent " + std::to_string(extents_[m]));
    }
  }
}

std::int64_t Shape::count() const {
  std::int64_t n = 1;
  for (auto e : extents_) n *= e;
  return n;
}

std::int64_t Shape::operator[](int mode) const {
  if (mode < 0 || mode >= order()) {
    fail(Errc::InvalidMode, "mode " + std::to_string(mode) + " of " + str());
  }
  return extents_[static_cast<std::size_t>(mode)];
}

std::string Shape::str() const {
  if (extents_.empty()) return "scalar";
  std::ostringstream out;
  for (std::size_t m = 0; m < extents_.size(); ++m) {
    if (m) out << 'x';
    out << extents_[m];
  }
  return out.str();
}

std::int64_t linearize(std::span<const std::int64_t> index, const Shape& shape) {
  if (static_cast<int>(index.size()) != shape.order()) {
    fail(Errc::IndexOutOfBounds, "index order " + std::to_string(index.size()) +
                                     " does not match shape " + shape.str());
  }
  std::int64_t offset = 0;
  std::int64_t stride = 1;
  for (int m = 0; m < shape.order(); ++m) {
    if (index[m] < 0 || index[m] >= shape[m]) {
      fail(Errc::IndexOutOfBounds, "component " + std::to_string(m) + " = " +
                                       std::to_string(index[m]) + " outside shape " + shape.str());
    }
    offset += index[m] * stride;
    stride *= shape[m];
  }
  return offset;
}

std::vector<std::int64_t> delinearize(std::int64_t offset, const Shape& shape) {
  if (offset < 0 || offset >= shape.count()) {
    fail(Errc::IndexOutOfBounds, "offset " + std::to_string(offset) + " outside shape " + shape.str());
  }
  std::vector<std::int64_t> index(shape.order());
  for (int m = 0; m < shape.order(); ++m) {
    index[m] = offset % shape[m];
    offset /= shape[m];
  }
  return index;
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(shape_.count()) {}

Tensor::Tensor(Shape shape, std::vector<cplx> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (static_cast<std::int64_t>(data_.size()) != shape_.count()) {
    fail(Errc::ShapeMismatch, "data length " + std::to_string(data_.size()) +
                                  " does not fill shape " + shape_.str());
  }
}

cplx Tensor::at(std::span<const std::int64_t> index) const {
  return data_[static_cast<std::size_t>(linearize(index, shape_))];
}

cplx& Tensor::at(std::span<const std::int64_t> index) {
  return data_[static_cast<std::size_t>(linearize(index, shape_))];
}

Tensor reshape(const Tensor& t, Shape shape) {
  if (shape.count() != t.size()) {
    fail(Errc::ShapeMismatch, "cannot view " + t.shape().str() + " as " + shape.str());
  }
  return Tensor(std::move(shape), std::vector<cplx>(t.data().begin(), t.data().end()));
}

Tensor split_mode(const Tensor& t, int mode, std::int64_t inner) {
  const std::int64_t extent = t.shape()[mode];
  if (inner < 1 || extent % inner != 0) {
    fail(Errc::ShapeMismatch, "inner " + std::to_string(inner) + " does not divide mode " +
                                  std::to_string(mode) + " of " + t.shape().str());
  }
  std::vector<std::int64_t> extents = t.shape().extents();
  extents[static_cast<std::size_t>(mode)] = inner;
  extents.insert(extents.begin() + mode + 1, extent / inner);
  return reshape(t, Shape(std::move(extents)));
}

Tensor merge_modes(const Tensor& t, int mode) {
  if (mode < 0 || mode + 1 >= t.shape().order()) {
    fail(Errc::InvalidMode, "cannot merge modes " + std::to_string(mode) + "," +
                                std::to_string(mode + 1) + " of " + t.shape().str());
  }
  std::vector<std::int64_t> extents = t.shape().extents();
  extents[static_cast<std::size_t>(mode)] *= extents[static_cast<std::size_t>(mode) + 1];
  extents.erase(extents.begin() + mode + 1);
  return reshape(t, Shape(std::move(extents)));
}

Tensor transpose(const Tensor& t, std::span<const int> perm) {
  const int order = t.shape().order();
  if (static_cast<int>(perm.size()) != order) {
    fail(Errc::InvalidPermutation, "permutation order " + std::to_string(perm.size()) +
                                       " for shape " + t.shape().str());
  }
  std::vector<bool> seen(static_cast<std::size_t>(order), false);
  for (int v : perm) {
    if (v < 0 || v >= order || seen[static_cast<std::size_t>(v)]) {
      fail(Errc::InvalidPermutation, "not a permutation of 0.." + std::to_string(order - 1));
    }
    seen[static_cast<std::size_t>(v)] = true;
  }

  std::vector<std::int64_t> out_extents(static_cast<std::size_t>(order));
  for (int j = 0; j < order; ++j) out_extents[static_cast<std::size_t>(j)] = t.shape()[perm[j]];
  Tensor out{Shape(out_extents)};

  // Column-major strides of the output, mapped back to input modes so one
  // sweep over the input in storage order fills the output.
  std::vector<std::int64_t> out_strides(static_cast<std::size_t>(order));
  std::int64_t stride = 1;
  for (int j = 0; j < order; ++j) {
    out_strides[static_cast<std::size_t>(j)] = stride;
    stride *= out_extents[static_cast<std::size_t>(j)];
  }
  std::vector<std::int64_t> contrib(static_cast<std::size_t>(order));
  for (int j = 0; j < order; ++j) contrib[static_cast<std::size_t>(perm[j])] = out_strides[static_cast<std::size_t>(j)];

  std::vector<std::int64_t> index(static_cast<std::size_t>(order), 0);
  std::int64_t out_off = 0;
  const std::int64_t n = t.size();
  auto src = t.data();
  auto dst = out.data();
  for (std::int64_t in_off = 0; in_off < n; ++in_off) {
    dst[static_cast<std::size_t>(out_off)] = src[static_cast<std::size_t>(in_off)];
    for (int m = 0; m < order; ++m) {
      index[static_cast<std::size_t>(m)]++;
      out_off += contrib[static_cast<std::size_t>(m)];
      if (index[static_cast<std::size_t>(m)] < t.shape()[m]) break;
      out_off -= contrib[static_cast<std::size_t>(m)] * t.shape()[m];
      index[static_cast<std::size_t>(m)] = 0;
    }
  }
  return out;
}

Tensor pointwise_mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    fail(Errc::ShapeMismatch, a.shape().str() + " vs " + b.shape().str());
  }
  Tensor out{a.shape()};
  auto pa = a.data();
  auto pb = b.data();
  auto po = out.data();
  for (std::size_t i = 0; i < pa.size(); ++i) po[i] = pa[i] * pb[i];
  return out;
}

}  // namespace gridfft
