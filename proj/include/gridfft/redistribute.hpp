#pragma once

#include "gridfft/comm.hpp"

namespace gridfft {

enum class RedistKind {
  LocalOnly,          // identical distributions, or a size-1 grid mode move
  AllToAllOverMode,   // one grid mode hops between two tensor modes
};

/// A planned change of distribution over a fixed global shape. Element
/// routing is derived from the owner maps of the two distributions while
/// packing; nothing is stored per element.
///
/// Supported changes: (a) src == dst, and (b) one grid mode moving from the
/// tail of one tensor mode's list to the tail of another's, which lowers to a
/// single all-to-all inside that grid mode's sub-communicator. Anything else
/// is UnsupportedRedist.
struct RedistPlan {
  RedistKind kind = RedistKind::LocalOnly;
  int comm_mode = -1;        // grid mode whose slice exchanges data
  int src_tensor_mode = -1;  // mode releasing the grid mode
  int dst_tensor_mode = -1;  // mode receiving it
  Shape global;
  TensorDistribution src;
  TensorDistribution dst;
  Grid grid;
};

RedistPlan plan_redist(const TensorDistribution& src, const TensorDistribution& dst,
                       const Grid& grid, const Shape& global_shape);

/// Group the local elements by destination rank (ascending position within
/// the exchanging sub-communicator); inside one buffer, elements are ordered
/// by destination-local column-major offset.
std::vector<ComplexVec> pack(const Tensor& local, const RedistPlan& plan, int rank);

/// Inverse of pack on the receiving side: writes the per-source buffers into
/// the destination-local block.
Tensor unpack(std::vector<ComplexVec> received, const RedistPlan& plan, int rank);

/// Apply a planned redistribution inside a rank program. All-to-all plans
/// issue exactly one collective; local-only plans issue none.
RankTensor redistribute(RankTensor rt, const TensorDistribution& dst, RankContext& ctx,
                        const std::string& stage_label = "");

/// Fallback for distribution changes outside plan_redist's patterns: one
/// world-wide all-to-all routed purely by the owner maps. Used by algorithms
/// that need a global reordering stage.
RankTensor redistribute_world(RankTensor rt, const TensorDistribution& dst, RankContext& ctx,
                              const std::string& stage_label = "");

/// Driver-side wrapper: runs the redistribution on every rank of dt's grid.
DistTensor execute_redist(const DistTensor& dt, const TensorDistribution& dst,
                          const SpawnOptions& opts = {});

}  // namespace gridfft
