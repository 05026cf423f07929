#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

#include "gridfft/tensor.hpp"

namespace gridfft {

enum class AlgorithmKind {
  Sixstep1d,           // 1D DFT over blocked layouts, three exchanges
  Cyclic1d,            // 1D DFT over elemental-cyclic layouts, one exchange
  SlabPencil,          // 3D DFT on a 1D grid
  PencilPencilPencil,  // 3D DFT on a 2D grid with cube rotations
  Volumetric,          // 3D DFT on a 3D grid, cyclic layout preserved
};

enum class OutputMode { Natural, Shuffled };

std::string_view algorithm_name(AlgorithmKind kind);   // sixstep|cyclic|slab|pencil|volumetric
AlgorithmKind algorithm_from_name(std::string_view name);

std::string_view output_mode_name(OutputMode mode);
OutputMode output_mode_from_name(std::string_view name);

/// Required processor-grid order: 1 for the 1D algorithms and the slab
/// decomposition, 2 for pencil^3, 3 for volumetric.
int grid_order_for(AlgorithmKind kind);

/// Split n = a*b with ranks | a and ranks | b, preferring the most balanced
/// pair (smaller factor first on ties). ShapeMismatch when no pair exists.
std::pair<std::int64_t, std::int64_t> balanced_factor_pair(std::int64_t n, std::int64_t ranks);

/// Divisibility screen: can the algorithm run these dims on this grid shape?
/// Mirrors the preconditions the algorithms enforce at run time.
bool algorithm_feasible(AlgorithmKind kind, const Shape& dims, const Shape& grid_shape);

}  // namespace gridfft
