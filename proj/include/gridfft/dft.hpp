#pragma once

#include <span>
#include <vector>

#include "gridfft/tensor.hpp"

namespace gridfft {

// Forward convention throughout: y[k] = sum_j exp(-2*pi*i*j*k/n) * x[j],
// no scaling. The inverse carries the 1/n factor and exists for round trips.

/// O(n^2) transform straight from the definition; the reference every other
/// transform in the library is checked against.
std::vector<cplx> dft_naive(std::span<const cplx> x);

std::vector<cplx> idft_naive(std::span<const cplx> y);

/// (rows x cols) matrix of roots of unity w_n^{l*k}, n = rows*cols, row l,
/// column k. All entries have unit modulus; row 0 and column 0 are ones.
Tensor twiddle(std::int64_t rows, std::int64_t cols);

/// One Cooley-Tukey step for n = rows*cols. The input is viewed column-major
/// as a (rows, cols) matrix, the output as (cols, rows); flat in and flat out
/// are both in natural vector order. Stages: row DFTs of length cols, twiddle
/// scaling, transposition, row DFTs of length rows.
std::vector<cplx> ct_step(std::span<const cplx> x, std::int64_t rows, std::int64_t cols);

/// Recursive Cooley-Tukey over the given radix sequence (product must equal
/// the input length). A single radix falls back to dft_naive.
std::vector<cplx> fft(std::span<const cplx> x, std::span<const std::int64_t> radices);

/// Replace every 1D line along `mode` by its DFT; other modes untouched.
/// Lines of composite length run through fft over their prime factorization.
Tensor batch_dft_mode(const Tensor& t, int mode);

/// Ascending prime factorization; n = 1 gives an empty list.
std::vector<std::int64_t> prime_factors(std::int64_t n);

/// Sequential multi-dimensional DFT by running dft_naive along every mode.
/// Serves as the comparison baseline for the parallel algorithms.
Tensor reference_dft_nd(const Tensor& t);

}  // namespace gridfft
