#include "gridfft/algorithm.hpp"

#include <cstdlib>
#include <string>

namespace gridfft {

std::string_view algorithm_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::Sixstep1d: return "sixstep";
    case AlgorithmKind::Cyclic1d: return "cyclic";
    case AlgorithmKind::SlabPencil: return "slab";
    case AlgorithmKind::PencilPencilPencil: return "pencil";
    case AlgorithmKind::Volumetric: return "volumetric";
  }
  return "?";
}

AlgorithmKind algorithm_from_name(std::string_view name) {
  if (name == "sixstep") return AlgorithmKind::Sixstep1d;
  if (name == "cyclic") return AlgorithmKind::Cyclic1d;
  if (name == "slab") return AlgorithmKind::SlabPencil;
  if (name == "pencil") return AlgorithmKind::PencilPencilPencil;
  if (name == "volumetric") return AlgorithmKind::Volumetric;
  fail(Errc::UnsupportedAlgorithm, std::string(name));
}

std::string_view output_mode_name(OutputMode mode) {
  return mode == OutputMode::Natural ? "natural" : "shuffled";
}

OutputMode output_mode_from_name(std::string_view name) {
  if (name == "natural") return OutputMode::Natural;
  if (name == "shuffled") return OutputMode::Shuffled;
  fail(Errc::InvalidParams, "output mode " + std::string(name));
}

int grid_order_for(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::Sixstep1d:
    case AlgorithmKind::Cyclic1d:
    case AlgorithmKind::SlabPencil:
      return 1;
    case AlgorithmKind::PencilPencilPencil:
      return 2;
    case AlgorithmKind::Volumetric:
      return 3;
  }
  return 0;
}

std::pair<std::int64_t, std::int64_t> balanced_factor_pair(std::int64_t n, std::int64_t ranks) {
  std::pair<std::int64_t, std::int64_t> best{0, 0};
  std::int64_t best_gap = -1;
  for (std::int64_t a = 1; a <= n; ++a) {
    if (n % a != 0) continue;
    const std::int64_t b = n / a;
    if (a % ranks != 0 || b % ranks != 0) continue;
    const std::int64_t gap = std::llabs(a - b);
    if (best_gap < 0 || gap < best_gap) {
      best = {a, b};
      best_gap = gap;
    }
  }
  if (best_gap < 0) {
    fail(Errc::ShapeMismatch, "no factorization of " + std::to_string(n) +
                                  " with both factors divisible by " + std::to_string(ranks));
  }
  return best;
}

namespace {

bool factor_pair_exists(std::int64_t n, std::int64_t ranks) {
  for (std::int64_t a = 1; a <= n; ++a) {
    if (n % a == 0 && a % ranks == 0 && (n / a) % ranks == 0) return true;
  }
  return false;
}

}  // namespace

bool algorithm_feasible(AlgorithmKind kind, const Shape& dims, const Shape& grid_shape) {
  const int data_order = grid_order_for(kind) == 1 && kind != AlgorithmKind::SlabPencil ? 1 : 3;
  if (dims.order() != data_order) return false;
  if (grid_shape.order() != grid_order_for(kind)) return false;

  switch (kind) {
    case AlgorithmKind::Sixstep1d:
    case AlgorithmKind::Cyclic1d:
      return factor_pair_exists(dims[0], grid_shape[0]);
    case AlgorithmKind::SlabPencil: {
      const std::int64_t p = grid_shape[0];
      return dims[2] % p == 0 && (dims[0] * dims[1]) % p == 0;
    }
    case AlgorithmKind::PencilPencilPencil: {
      for (int g = 0; g < 2; ++g) {
        for (int m = 0; m < 3; ++m) {
          if (dims[m] % grid_shape[g] != 0) return false;
        }
      }
      return true;
    }
    case AlgorithmKind::Volumetric: {
      for (int m = 0; m < 3; ++m) {
        if (!factor_pair_exists(dims[m], grid_shape[m])) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace gridfft
