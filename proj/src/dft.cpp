#include "gridfft/dft.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace gridfft {

namespace {

// Root-of-unity table for one transform length; exponents are reduced mod n
// in integer arithmetic so large j*k products do not lose precision.
std::vector<cplx> unit_roots(std::int64_t n, double sign) {
  std::vector<cplx> roots(static_cast<std::size_t>(n));
  for (std::int64_t t = 0; t < n; ++t) {
    roots[static_cast<std::size_t>(t)] =
        std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n));
  }
  return roots;
}

std::vector<cplx> dft_with_sign(std::span<const cplx> x, double sign) {
  const auto n = static_cast<std::int64_t>(x.size());
  if (n == 0) fail(Errc::EmptyInput, "transform of an empty vector");
  const auto roots = unit_roots(n, sign);
  std::vector<cplx> y(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    cplx acc{0.0, 0.0};
    for (std::int64_t j = 0; j < n; ++j) {
      acc += x[static_cast<std::size_t>(j)] * roots[static_cast<std::size_t>((j * k) % n)];
    }
    y[static_cast<std::size_t>(k)] = acc;
  }
  return y;
}

using LineTransform = std::function<std::vector<cplx>(std::span<const cplx>)>;

// Apply a transform to every row of a (rows, cols) column-major matrix; a row
// is the length-cols line at stride rows.
void transform_rows(std::vector<cplx>& data, std::int64_t rows, std::int64_t cols,
                    const LineTransform& line_transform) {
  std::vector<cplx> line(static_cast<std::size_t>(cols));
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t c = 0; c < cols; ++c) {
      line[static_cast<std::size_t>(c)] = data[static_cast<std::size_t>(r + rows * c)];
    }
    const auto out = line_transform(line);
    for (std::int64_t c = 0; c < cols; ++c) {
      data[static_cast<std::size_t>(r + rows * c)] = out[static_cast<std::size_t>(c)];
    }
  }
}

std::vector<cplx> transpose_flat(const std::vector<cplx>& data, std::int64_t rows, std::int64_t cols) {
  std::vector<cplx> out(data.size());
  for (std::int64_t c = 0; c < cols; ++c) {
    for (std::int64_t r = 0; r < rows; ++r) {
      out[static_cast<std::size_t>(c + cols * r)] = data[static_cast<std::size_t>(r + rows * c)];
    }
  }
  return out;
}

// Shared body of ct_step and the recursive fft: the row transform of the
// first stage is a parameter so composite lengths can recurse.
std::vector<cplx> ct_body(std::span<const cplx> x, std::int64_t rows, std::int64_t cols,
                          const LineTransform& first_stage) {
  std::vector<cplx> work(x.begin(), x.end());
  transform_rows(work, rows, cols, first_stage);
  const Tensor factors = twiddle(rows, cols);  // same column-major layout as work
  auto tw = factors.data();
  for (std::size_t i = 0; i < work.size(); ++i) work[i] *= tw[i];
  work = transpose_flat(work, rows, cols);
  transform_rows(work, cols, rows, [](std::span<const cplx> line) { return dft_naive(line); });
  return work;
}

void check_line_length(std::span<const cplx> x, std::int64_t rows, std::int64_t cols) {
  if (rows < 1 || cols < 1 || rows * cols != static_cast<std::int64_t>(x.size())) {
    fail(Errc::ShapeMismatch, std::to_string(rows) + "*" + std::to_string(cols) +
                                  " does not match input length " + std::to_string(x.size()));
  }
}

}  // namespace

std::vector<cplx> dft_naive(std::span<const cplx> x) { return dft_with_sign(x, -1.0); }

std::vector<cplx> idft_naive(std::span<const cplx> y) {
  auto x = dft_with_sign(y, 1.0);
  const double scale = 1.0 / static_cast<double>(y.size());
  for (auto& v : x) v *= scale;
  return x;
}

Tensor twiddle(std::int64_t rows, std::int64_t cols) {
  if (rows < 1 || cols < 1) {
    fail(Errc::ShapeMismatch, "twiddle sizes " + std::to_string(rows) + "," + std::to_string(cols));
  }
  const std::int64_t n = rows * cols;
  Tensor out{Shape{rows, cols}};
  auto data = out.data();
  for (std::int64_t k = 0; k < cols; ++k) {
    for (std::int64_t l = 0; l < rows; ++l) {
      data[static_cast<std::size_t>(l + rows * k)] =
          std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((l * k) % n) / static_cast<double>(n));
    }
  }
  return out;
}

std::vector<cplx> ct_step(std::span<const cplx> x, std::int64_t rows, std::int64_t cols) {
  check_line_length(x, rows, cols);
  return ct_body(x, rows, cols, [](std::span<const cplx> line) { return dft_naive(line); });
}

std::vector<cplx> fft(std::span<const cplx> x, std::span<const std::int64_t> radices) {
  std::int64_t product = 1;
  for (auto r : radices) {
    if (r < 1) fail(Errc::ShapeMismatch, "radix " + std::to_string(r));
    product *= r;
  }
  if (product != static_cast<std::int64_t>(x.size())) {
    fail(Errc::ShapeMismatch, "radix product " + std::to_string(product) +
                                  " does not match input length " + std::to_string(x.size()));
  }
  if (radices.empty()) return std::vector<cplx>(x.begin(), x.end());  // length 1
  if (radices.size() == 1) return dft_naive(x);
  const std::int64_t rows = radices[0];
  const std::int64_t cols = product / rows;
  const auto rest = radices.subspan(1);
  return ct_body(x, rows, cols,
                 [rest](std::span<const cplx> line) { return fft(line, rest); });
}

namespace {

// Walk every line of t along `mode` and replace it via line_transform.
Tensor transform_mode(const Tensor& t, int mode, const LineTransform& line_transform) {
  if (mode < 0 || mode >= t.shape().order()) {
    fail(Errc::InvalidMode, "mode " + std::to_string(mode) + " of " + t.shape().str());
  }
  const std::int64_t length = t.shape()[mode];
  std::int64_t stride = 1;
  for (int m = 0; m < mode; ++m) stride *= t.shape()[m];
  const std::int64_t block = stride * length;
  const std::int64_t blocks = t.size() / block;

  Tensor out = t;
  auto data = out.data();
  std::vector<cplx> line(static_cast<std::size_t>(length));
  for (std::int64_t b = 0; b < blocks; ++b) {
    for (std::int64_t low = 0; low < stride; ++low) {
      const std::int64_t base = b * block + low;
      for (std::int64_t j = 0; j < length; ++j) {
        line[static_cast<std::size_t>(j)] = data[static_cast<std::size_t>(base + j * stride)];
      }
      const auto transformed = line_transform(line);
      for (std::int64_t j = 0; j < length; ++j) {
        data[static_cast<std::size_t>(base + j * stride)] = transformed[static_cast<std::size_t>(j)];
      }
    }
  }
  return out;
}

}  // namespace

Tensor batch_dft_mode(const Tensor& t, int mode) {
  if (mode < 0 || mode >= t.shape().order()) {
    fail(Errc::InvalidMode, "mode " + std::to_string(mode) + " of " + t.shape().str());
  }
  const auto radices = prime_factors(t.shape()[mode]);
  return transform_mode(t, mode, [&radices](std::span<const cplx> line) { return fft(line, radices); });
}

std::vector<std::int64_t> prime_factors(std::int64_t n) {
  if (n < 1) fail(Errc::InvalidParams, "prime_factors of " + std::to_string(n));
  std::vector<std::int64_t> factors;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    while (n % d == 0) {
      factors.push_back(d);
      n /= d;
    }
  }
  if (n > 1) factors.push_back(n);
  return factors;
}

Tensor reference_dft_nd(const Tensor& t) {
  Tensor out = t;
  for (int mode = 0; mode < t.shape().order(); ++mode) {
    out = transform_mode(out, mode, [](std::span<const cplx> line) { return dft_naive(line); });
  }
  return out;
}

}  // namespace gridfft
