#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridfft/algorithm.hpp"

namespace gridfft {

/// Alpha-beta parameters of the all-to-all bounds: alpha is the start-up
/// cost per step (seconds), beta the inverse bandwidth (seconds per complex
/// element), ports the number of links a node can drive at once.
struct CostParams {
  double alpha = 1e-5;
  double beta = 1e-9;
  int ports = 1;
};

struct StageCost {
  std::string label;
  std::int64_t ranks = 1;      // sub-communicator size
  std::int64_t elements = 0;   // data across that rank set
  double latency = 0.0;
  double bandwidth = 0.0;
  double total = 0.0;          // latency + bandwidth
  std::string variant;         // "mst" or "bkt", whichever was cheaper
};

struct CostEstimate {
  double latency = 0.0;
  double bandwidth = 0.0;
  double total = 0.0;
  std::vector<StageCost> stages;
};

enum class AllToAllVariant { Mst, Bkt };

/// Spanning-tree style bound: log_{k+1}(p) steps, n/((k+1) p) elements per
/// step. The logarithm is evaluated as a real number.
CostEstimate cost_mst(std::int64_t ranks, std::int64_t elements, const CostParams& params);

/// Bucket style bound: ceil((p-1)/k) steps, n/p^2 elements per step.
CostEstimate cost_bkt(std::int64_t ranks, std::int64_t elements, const CostParams& params);

/// Smallest rank count from which the bound's latency term dominates its
/// bandwidth term: p >= n*beta/((k+1)*alpha) for mst, p^2 >= n*beta/alpha
/// for bkt.
std::int64_t latency_threshold(AllToAllVariant variant, std::int64_t elements,
                               const CostParams& params);

/// Parallelism cap: slab max(n0,n1,n2); pencil max of the three face areas;
/// volumetric one element per rank. The 1D algorithms have no defined cap.
std::int64_t max_procs(AlgorithmKind kind, const Shape& dims);

/// Communication-only estimate: the cheaper of the two bounds per stage,
/// summed over the algorithm's exchange stages (slab one world stage, pencil
/// one per 2D grid mode, volumetric one per 3D grid mode). Each stage moves
/// the cube share held by its rank set.
CostEstimate estimate_algorithm(AlgorithmKind kind, const Shape& dims, const Shape& grid_shape,
                                const CostParams& params);

/// One row of the power-of-two grid table: the 1D/2D/3D grid shapes available
/// at a given rank count, absent where the torus limits rule them out.
struct GridConfigs {
  std::int64_t ranks = 0;
  std::optional<Shape> grid_1d;
  std::optional<Shape> grid_2d;
  std::optional<Shape> grid_3d;
};

/// Supported rank counts are the powers of two from 2 to 32768.
GridConfigs grid_configs(std::int64_t ranks);
const std::vector<std::int64_t>& grid_config_counts();
std::string grid_configs_csv();

struct AdviceRow {
  AlgorithmKind alg = AlgorithmKind::SlabPencil;
  Shape grid;
  CostEstimate cost;
};

/// Feasible (algorithm, grid) pairs at one rank count, cheapest first; ties
/// break toward fewer exchange stages, then lower grid order.
std::vector<AdviceRow> advise(const Shape& dims, std::int64_t ranks, const CostParams& params);

}  // namespace gridfft
