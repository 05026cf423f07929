#pragma once

#include "gridfft/algorithm.hpp"
#include "gridfft/dft.hpp"
#include "gridfft/redistribute.hpp"

namespace gridfft {

using ModeFactor = std::optional<std::pair<std::int64_t, std::int64_t>>;

/// A transform request: 1D problems carry dims (n), 3D problems (n0,n1,n2).
/// `factors` optionally pins the Cooley-Tukey split per dimension (used by
/// the 1D algorithms and by volumetric); unset entries default to the most
/// balanced pair compatible with the grid.
struct DftProblem {
  Shape dims;
  std::vector<ModeFactor> factors;
  OutputMode output_mode = OutputMode::Natural;
};

/// Output of one distributed transform. `stage_dists` records the
/// distribution string at the end of every communication stage, identical on
/// all ranks; `logs` holds each rank's collective log.
struct ParallelRun {
  DistTensor output;
  std::vector<EventLog> logs;
  std::vector<std::string> stage_dists;
};

// The five algorithms. Each takes data already laid out as documented below,
// runs one worker per grid rank, and returns the algorithm's native output
// layout. Gathering the output always yields the DFT in natural order; the
// shuffled modes differ only in how the result is distributed, never in the
// gathered values.

/// Blocked 1D transform (three exchanges: redistribute-in, global-transpose,
/// redistribute-out). Input: vector n = rows*cols viewed as (rows, cols/p, p)
/// with "[(),(),(0)]" (each rank holds a contiguous block of columns); p must
/// divide rows and cols. Output: (cols, rows/p, p) with "[(),(),(0)]".
ParallelRun dft1d_sixstep(const DistTensor& x, const SpawnOptions& opts = {});

/// Elemental-cyclic 1D transform, one exchange. Input: (rows, cols) with
/// "[(0),()]" and p | rows, p | cols. Output: (cols, rows) with "[(0),()]" --
/// the same distribution the input carried.
ParallelRun dft1d_cyclic(const DistTensor& x, const SpawnOptions& opts = {});

/// Slab decomposition on a 1D grid: local 2D transforms, one exchange, local
/// 1D transforms; natural mode adds the store-order exchange (two total).
/// Input: (n0,n1,n2) with "[(),(),(0)]"; p | n2 and p | n0*n1.
ParallelRun dft3d_slab(const DistTensor& cube, OutputMode output_mode,
                       const SpawnOptions& opts = {});

/// Pencil decomposition on a 2D grid: three (transform, rotate) phases, three
/// exchanges; natural mode appends a fourth, world-wide reordering stage.
/// Input: (n0,n1,n2) with "[(),(0),(1)]"; both grid extents must divide every
/// cube extent.
ParallelRun dft3d_pencil(const DistTensor& cube, OutputMode output_mode,
                         const SpawnOptions& opts = {});

/// Volumetric decomposition on a 3D grid: the cyclic 1D algorithm runs inside
/// every cube dimension (one exchange each); "[(0),(1),(2)]" is preserved
/// after every stage. Per dimension d, n_d splits as a_d*b_d with
/// p_d | a_d and p_d | b_d.
ParallelRun dft3d_volumetric(const DistTensor& cube, const std::vector<ModeFactor>& factors = {},
                             const SpawnOptions& opts = {});

/// Scatter `input` into the canonical starting layout of an algorithm.
DistTensor make_initial_layout(const DftProblem& problem, AlgorithmKind kind, const Grid& grid,
                               const Tensor& input);

struct DftRun {
  ParallelRun run;
  Tensor gathered;  // natural-order transform reshaped to problem.dims
};

/// End-to-end convenience: lay out, run, gather.
DftRun run_parallel_dft(const DftProblem& problem, AlgorithmKind kind, const Grid& grid,
                        const Tensor& input, const SpawnOptions& opts = {});

/// Exact number of all-to-alls the algorithm performs on this grid (stages
/// over size-1 slices stay local and do not communicate).
int expected_collectives(AlgorithmKind kind, const Grid& grid, OutputMode output_mode);

}  // namespace gridfft
