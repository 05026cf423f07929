#pragma once

#include <span>
#include <string>
#include <vector>

#include "gridfft/tensor.hpp"

namespace gridfft {

/// A d-dimensional processor mesh. Rank <-> coordinate is the column-major
/// bijection, mirroring tensor storage.
class Grid {
 public:
  Grid() : shape_{1} {}
  explicit Grid(Shape shape);

  const Shape& shape() const { return shape_; }
  int order() const { return shape_.order(); }
  int size() const { return static_cast<int>(shape_.count()); }

  std::vector<std::int64_t> coords(int rank) const;
  int rank_of(std::span<const std::int64_t> coords) const;

  bool operator==(const Grid&) const = default;

 private:
  Shape shape_;
};

/// Per-tensor-mode lists of grid modes: the bracket notation "[(0),(1),()]".
/// An empty list leaves the mode undistributed; a list (g0,g1) composes the
/// grid coordinates column-major (g0 fastest). Each grid mode may appear at
/// most once across the whole distribution.
class TensorDistribution {
 public:
  TensorDistribution() = default;
  explicit TensorDistribution(std::vector<std::vector<int>> mode_dists);

  static TensorDistribution undistributed(int order);

  /// Parse the bracket grammar; commas between groups are optional, e.g.
  /// "[(0),()]" and "[(0)()]" are the same distribution. ParseError carries
  /// the byte position of the offending character.
  static TensorDistribution parse(const std::string& text);

  /// Canonical form: groups comma-separated, e.g. "[(0),(1),(2)]".
  std::string str() const;

  int order() const { return static_cast<int>(mode_dists_.size()); }
  std::span<const int> modes_for(int tensor_mode) const;
  const std::vector<std::vector<int>>& mode_dists() const { return mode_dists_; }

  bool operator==(const TensorDistribution&) const = default;

 private:
  std::vector<std::vector<int>> mode_dists_;
};

inline TensorDistribution parse_dist(const std::string& text) { return TensorDistribution::parse(text); }

/// Product of the grid extents assigned to one tensor mode (1 if none).
std::int64_t combined_grid_size(const TensorDistribution& dist, const Grid& grid, int tensor_mode);

/// Orders must match, referenced grid modes must exist, and every distributed
/// extent must be divisible by its combined grid size.
void validate_distribution(const Shape& global, const TensorDistribution& dist, const Grid& grid);

struct Placement {
  int rank;
  std::vector<std::int64_t> local_index;
};

/// Elemental-cyclic ownership: per mode with combined grid size g, the grid
/// coordinate is i mod g (decomposed column-major over the listed grid modes)
/// and the local component is i div g. Unassigned grid modes sit at
/// coordinate 0. Bijective between global indices and (rank, local) pairs.
Placement owner_of(std::span<const std::int64_t> global_index, const TensorDistribution& dist,
                   const Grid& grid, const Shape& global_shape);

/// Reverse of owner_of for a given rank: global component = local*g + c.
std::vector<std::int64_t> global_index_of(std::span<const std::int64_t> local_index,
                                          const TensorDistribution& dist, const Grid& grid,
                                          int rank, const Shape& global_shape);

/// Uniform on every rank under the divisibility invariant.
Shape local_shape(const Shape& global, const TensorDistribution& dist, const Grid& grid);

/// Driver-side container: global metadata plus every rank's local block.
class DistTensor {
 public:
  DistTensor(Shape global, TensorDistribution dist, Grid grid, std::vector<Tensor> locals);

  const Shape& global_shape() const { return global_; }
  const TensorDistribution& dist() const { return dist_; }
  const Grid& grid() const { return grid_; }
  const Tensor& local(int rank) const;
  int ranks() const { return grid_.size(); }

 private:
  Shape global_;
  TensorDistribution dist_;
  Grid grid_;
  std::vector<Tensor> locals_;
};

DistTensor scatter_global(const Tensor& t, const TensorDistribution& dist, const Grid& grid);
Tensor gather_global(const DistTensor& dt);

/// Rank-side handle: the shared global metadata plus the one local block a
/// rank program owns and mutates.
struct RankTensor {
  Shape global;
  TensorDistribution dist;
  Grid grid;
  int rank = 0;
  Tensor local;
};

RankTensor rank_view(const DistTensor& dt, int rank);

// Structure ops that commute with ownership, so they never move data between
// ranks; they relabel metadata and reinterpret or permute the local block.

/// Permute tensor modes globally: shape, per-mode grid lists, and the local
/// block are permuted together.
RankTensor transpose(const RankTensor& rt, std::span<const int> perm);

/// Split `mode` into (inner, extent/inner). The mode's grid assignment stays
/// on the inner (fast) part, which therefore must keep the divisibility
/// invariant: combined grid size | inner.
RankTensor split_mode(const RankTensor& rt, int mode, std::int64_t inner);

/// Merge modes (mode, mode+1); mode+1 must be undistributed.
RankTensor merge_modes(const RankTensor& rt, int mode);

}  // namespace gridfft
