#pragma once

// Test-only reference transforms and input generators. These are written
// straight from the definition, term by term, and stay independent of the
// transform paths in the library so they can serve as checking oracles.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "gridfft/tensor.hpp"

namespace gridfft::testing {

inline std::vector<cplx> oracle_dft(std::span<const cplx> x) {
  const auto n = static_cast<std::int64_t>(x.size());
  std::vector<cplx> y(x.size());
  for (std::int64_t k = 0; k < n; ++k) {
    cplx acc{0.0, 0.0};
    for (std::int64_t j = 0; j < n; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) *
                           static_cast<double>(k) / static_cast<double>(n);
      acc += x[static_cast<std::size_t>(j)] * cplx{std::cos(angle), std::sin(angle)};
    }
    y[static_cast<std::size_t>(k)] = acc;
  }
  return y;
}

// Separable multi-dimensional DFT: oracle_dft along every mode, with explicit
// strided line walks.
inline Tensor oracle_dft_nd(const Tensor& t) {
  Tensor out = t;
  for (int mode = 0; mode < t.shape().order(); ++mode) {
    const std::int64_t length = out.shape()[mode];
    std::int64_t stride = 1;
    for (int m = 0; m < mode; ++m) stride *= out.shape()[m];
    const std::int64_t block = stride * length;
    const std::int64_t blocks = out.size() / block;
    auto data = out.data();
    std::vector<cplx> line(static_cast<std::size_t>(length));
    for (std::int64_t b = 0; b < blocks; ++b) {
      for (std::int64_t low = 0; low < stride; ++low) {
        for (std::int64_t j = 0; j < length; ++j) {
          line[static_cast<std::size_t>(j)] = data[static_cast<std::size_t>(b * block + low + j * stride)];
        }
        const auto transformed = oracle_dft(line);
        for (std::int64_t j = 0; j < length; ++j) {
          data[static_cast<std::size_t>(b * block + low + j * stride)] = transformed[static_cast<std::size_t>(j)];
        }
      }
    }
  }
  return out;
}

// Brute-force 3D DFT evaluated as the full triple sum per output point; keep
// the extents tiny.
inline Tensor oracle_dft_3d_direct(const Tensor& t) {
  const std::int64_t n0 = t.shape()[0];
  const std::int64_t n1 = t.shape()[1];
  const std::int64_t n2 = t.shape()[2];
  Tensor out{t.shape()};
  for (std::int64_t k2 = 0; k2 < n2; ++k2) {
    for (std::int64_t k1 = 0; k1 < n1; ++k1) {
      for (std::int64_t k0 = 0; k0 < n0; ++k0) {
        cplx acc{0.0, 0.0};
        for (std::int64_t j2 = 0; j2 < n2; ++j2) {
          for (std::int64_t j1 = 0; j1 < n1; ++j1) {
            for (std::int64_t j0 = 0; j0 < n0; ++j0) {
              const double angle =
                  -2.0 * std::numbers::pi *
                  (static_cast<double>(j0 * k0) / static_cast<double>(n0) +
                   static_cast<double>(j1 * k1) / static_cast<double>(n1) +
                   static_cast<double>(j2 * k2) / static_cast<double>(n2));
              const std::array<std::int64_t, 3> j{j0, j1, j2};
              acc += t.at(j) * cplx{std::cos(angle), std::sin(angle)};
            }
          }
        }
        const std::array<std::int64_t, 3> k{k0, k1, k2};
        out.at(k) = acc;
      }
    }
  }
  return out;
}

inline double rel_l2(std::span<const cplx> got, std::span<const cplx> want) {
  double err2 = 0.0;
  double ref2 = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    err2 += std::norm(got[i] - want[i]);
    ref2 += std::norm(want[i]);
  }
  return ref2 == 0.0 ? std::sqrt(err2) : std::sqrt(err2 / ref2);
}

inline std::vector<cplx> random_vec(std::int64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<cplx> out(static_cast<std::size_t>(n));
  for (auto& v : out) {
    const double re = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    const double im = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    v = cplx{re, im};
  }
  return out;
}

inline Tensor random_tensor(const Shape& shape, std::uint64_t seed) {
  return Tensor{shape, random_vec(shape.count(), seed)};
}

}  // namespace gridfft::testing
