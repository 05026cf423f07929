#include "gridfft/distribution.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace gridfft {

Grid::Grid(Shape shape) : shape_(std::move(shape)) {
  if (shape_.order() == 0) fail(Errc::ShapeMismatch, "grid must have at least one mode");
}

std::vector<std::int64_t> Grid::coords(int rank) const {
  if (rank < 0 || rank >= size()) {
    fail(Errc::IndexOutOfBounds, "rank " + std::to_string(rank) + " on grid " + shape_.str());
  }
  return delinearize(rank, shape_);
}

int Grid::rank_of(std::span<const std::int64_t> coords) const {
  return static_cast<int>(linearize(coords, shape_));
}

TensorDistribution::TensorDistribution(std::vector<std::vector<int>> mode_dists)
    : mode_dists_(std::move(mode_dists)) {
  std::set<int> used;
  for (const auto& list : mode_dists_) {
    for (int g : list) {
      if (g < 0) fail(Errc::ParseError, "negative grid mode " + std::to_string(g));
      if (!used.insert(g).second) {
        fail(Errc::ParseError, "grid mode " + std::to_string(g) + " assigned to multiple tensor modes");
      }
    }
  }
}

TensorDistribution TensorDistribution::undistributed(int order) {
  return TensorDistribution(std::vector<std::vector<int>>(static_cast<std::size_t>(order)));
}

TensorDistribution TensorDistribution::parse(const std::string& text) {
  std::size_t pos = 0;
  auto error = [&](const std::string& what) -> void {
    fail(Errc::ParseError, what + " at position " + std::to_string(pos) + " in \"" + text + "\"");
  };
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };

  skip_ws();
  if (pos >= text.size() || text[pos] != '[') error("expected '['");
  ++pos;

  std::vector<std::vector<int>> groups;
  bool closed = false;
  while (pos < text.size()) {
    skip_ws();
    if (pos >= text.size()) break;
    if (text[pos] == ']') {
      ++pos;
      closed = true;
      break;
    }
    if (text[pos] == ',' && !groups.empty()) {  // optional separator between groups
      ++pos;
      continue;
    }
    if (text[pos] != '(') error("expected '('");
    ++pos;
    std::vector<int> group;
    skip_ws();
    while (pos < text.size() && text[pos] != ')') {
      if (!group.empty()) {
        if (text[pos] != ',') error("expected ',' between grid modes");
        ++pos;
        skip_ws();
      }
      if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
        error("expected a grid mode digit");
      }
      int value = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        value = value * 10 + (text[pos] - '0');
        ++pos;
      }
      group.push_back(value);
      skip_ws();
    }
    if (pos >= text.size() || text[pos] != ')') error("expected ')'");
    ++pos;
    groups.push_back(std::move(group));
  }
  if (!closed) error("expected ']'");
  skip_ws();
  if (pos != text.size()) error("trailing characters");
  if (groups.empty()) error("a distribution needs at least one mode group");
  return TensorDistribution(std::move(groups));
}

std::string TensorDistribution::str() const {
  std::string out = "[";
  for (std::size_t m = 0; m < mode_dists_.size(); ++m) {
    if (m) out += ',';
    out += '(';
    for (std::size_t j = 0; j < mode_dists_[m].size(); ++j) {
      if (j) out += ',';
      out += std::to_string(mode_dists_[m][j]);
    }
    out += ')';
  }
  out += ']';
  return out;
}

std::span<const int> TensorDistribution::modes_for(int tensor_mode) const {
  if (tensor_mode < 0 || tensor_mode >= order()) {
    fail(Errc::InvalidMode, "tensor mode " + std::to_string(tensor_mode) + " of " + str());
  }
  return mode_dists_[static_cast<std::size_t>(tensor_mode)];
}

std::int64_t combined_grid_size(const TensorDistribution& dist, const Grid& grid, int tensor_mode) {
  std::int64_t g = 1;
  for (int gm : dist.modes_for(tensor_mode)) g *= grid.shape()[gm];
  return g;
}

void validate_distribution(const Shape& global, const TensorDistribution& dist, const Grid& grid) {
  if (global.order() != dist.order()) {
    fail(Errc::ShapeMismatch, "distribution " + dist.str() + " has " + std::to_string(dist.order()) +
                                  " modes but the tensor is " + global.str());
  }
  for (int m = 0; m < dist.order(); ++m) {
    for (int gm : dist.modes_for(m)) {
      if (gm >= grid.order()) {
        fail(Errc::InvalidMode, "grid mode " + std::to_string(gm) + " outside grid " + grid.shape().str());
      }
    }
    const std::int64_t g = combined_grid_size(dist, grid, m);
    if (global[m] % g != 0) {
      fail(Errc::ShapeMismatch, "mode " + std::to_string(m) + " extent " + std::to_string(global[m]) +
                                    " not divisible by grid share " + std::to_string(g));
    }
  }
}

Placement owner_of(std::span<const std::int64_t> global_index, const TensorDistribution& dist,
                   const Grid& grid, const Shape& global_shape) {
  if (static_cast<int>(global_index.size()) != global_shape.order()) {
    fail(Errc::IndexOutOfBounds, "index order does not match " + global_shape.str());
  }
  std::vector<std::int64_t> grid_coords(static_cast<std::size_t>(grid.order()), 0);
  Placement placement;
  placement.local_index.resize(global_index.size());
  for (int m = 0; m < global_shape.order(); ++m) {
    const std::int64_t i = global_index[m];
    if (i < 0 || i >= global_shape[m]) {
      fail(Errc::IndexOutOfBounds, "component " + std::to_string(m) + " = " + std::to_string(i) +
                                       " outside " + global_shape.str());
    }
    const std::int64_t g = combined_grid_size(dist, grid, m);
    std::int64_t cyc = i % g;
    placement.local_index[static_cast<std::size_t>(m)] = i / g;
    for (int gm : dist.modes_for(m)) {
      grid_coords[static_cast<std::size_t>(gm)] = cyc % grid.shape()[gm];
      cyc /= grid.shape()[gm];
    }
  }
  placement.rank = grid.rank_of(grid_coords);
  return placement;
}

std::vector<std::int64_t> global_index_of(std::span<const std::int64_t> local_index,
                                          const TensorDistribution& dist, const Grid& grid,
                                          int rank, const Shape& global_shape) {
  const auto coords = grid.coords(rank);
  std::vector<std::int64_t> global_index(local_index.size());
  for (int m = 0; m < global_shape.order(); ++m) {
    std::int64_t cyc = 0;
    std::int64_t scale = 1;
    for (int gm : dist.modes_for(m)) {
      cyc += coords[static_cast<std::size_t>(gm)] * scale;
      scale *= grid.shape()[gm];
    }
    global_index[static_cast<std::size_t>(m)] = local_index[m] * scale + cyc;
  }
  return global_index;
}

Shape local_shape(const Shape& global, const TensorDistribution& dist, const Grid& grid) {
  validate_distribution(global, dist, grid);
  std::vector<std::int64_t> extents(static_cast<std::size_t>(global.order()));
  for (int m = 0; m < global.order(); ++m) {
    extents[static_cast<std::size_t>(m)] = global[m] / combined_grid_size(dist, grid, m);
  }
  return Shape(std::move(extents));
}

DistTensor::DistTensor(Shape global, TensorDistribution dist, Grid grid, std::vector<Tensor> locals)
    : global_(std::move(global)), dist_(std::move(dist)), grid_(std::move(grid)), locals_(std::move(locals)) {
  validate_distribution(global_, dist_, grid_);
  if (static_cast<int>(locals_.size()) != grid_.size()) {
    fail(Errc::SizeMismatch, "expected " + std::to_string(grid_.size()) + " local blocks, got " +
                                 std::to_string(locals_.size()));
  }
  const Shape expected = local_shape(global_, dist_, grid_);
  for (const auto& block : locals_) {
    if (block.shape() != expected) {
      fail(Errc::ShapeMismatch, "local block " + block.shape().str() + " should be " + expected.str());
    }
  }
}

const Tensor& DistTensor::local(int rank) const {
  if (rank < 0 || rank >= ranks()) {
    fail(Errc::IndexOutOfBounds, "rank " + std::to_string(rank));
  }
  return locals_[static_cast<std::size_t>(rank)];
}

DistTensor scatter_global(const Tensor& t, const TensorDistribution& dist, const Grid& grid) {
  validate_distribution(t.shape(), dist, grid);
  const Shape block_shape = local_shape(t.shape(), dist, grid);
  std::vector<Tensor> locals(static_cast<std::size_t>(grid.size()), Tensor{block_shape});

  const std::int64_t n = t.size();
  std::vector<std::int64_t> index(static_cast<std::size_t>(t.shape().order()), 0);
  auto src = t.data();
  for (std::int64_t off = 0; off < n; ++off) {
    const Placement p = owner_of(index, dist, grid, t.shape());
    locals[static_cast<std::size_t>(p.rank)].data()[static_cast<std::size_t>(
        linearize(p.local_index, block_shape))] = src[static_cast<std::size_t>(off)];
    for (int m = 0; m < t.shape().order(); ++m) {
      if (++index[static_cast<std::size_t>(m)] < t.shape()[m]) break;
      index[static_cast<std::size_t>(m)] = 0;
    }
  }
  return DistTensor(t.shape(), dist, grid, std::move(locals));
}

Tensor gather_global(const DistTensor& dt) {
  Tensor out{dt.global_shape()};
  const Shape block_shape = local_shape(dt.global_shape(), dt.dist(), dt.grid());
  auto dst = out.data();
  std::vector<std::int64_t> index(static_cast<std::size_t>(dt.global_shape().order()), 0);
  const std::int64_t n = out.size();
  for (std::int64_t off = 0; off < n; ++off) {
    const Placement p = owner_of(index, dt.dist(), dt.grid(), dt.global_shape());
    dst[static_cast<std::size_t>(off)] = dt.local(p.rank).data()[static_cast<std::size_t>(
        linearize(p.local_index, block_shape))];
    for (int m = 0; m < dt.global_shape().order(); ++m) {
      if (++index[static_cast<std::size_t>(m)] < dt.global_shape()[m]) break;
      index[static_cast<std::size_t>(m)] = 0;
    }
  }
  return out;
}

RankTensor rank_view(const DistTensor& dt, int rank) {
  return RankTensor{dt.global_shape(), dt.dist(), dt.grid(), rank, dt.local(rank)};
}

RankTensor transpose(const RankTensor& rt, std::span<const int> perm) {
  RankTensor out;
  out.grid = rt.grid;
  out.rank = rt.rank;
  out.local = transpose(rt.local, perm);

  std::vector<std::int64_t> extents(perm.size());
  std::vector<std::vector<int>> lists(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) {
    extents[j] = rt.global[perm[j]];
    const auto src = rt.dist.modes_for(perm[j]);
    lists[j].assign(src.begin(), src.end());
  }
  out.global = Shape(std::move(extents));
  out.dist = TensorDistribution(std::move(lists));
  return out;
}

RankTensor split_mode(const RankTensor& rt, int mode, std::int64_t inner) {
  const std::int64_t g = combined_grid_size(rt.dist, rt.grid, mode);
  if (inner < 1 || rt.global[mode] % inner != 0 || inner % g != 0) {
    fail(Errc::ShapeMismatch, "cannot split mode " + std::to_string(mode) + " of " +
                                  rt.global.str() + " into inner " + std::to_string(inner) +
                                  " under " + rt.dist.str());
  }
  std::vector<std::int64_t> extents = rt.global.extents();
  extents[static_cast<std::size_t>(mode)] = inner;
  extents.insert(extents.begin() + mode + 1, rt.global[mode] / inner);

  std::vector<std::vector<int>> lists = rt.dist.mode_dists();
  lists.insert(lists.begin() + mode + 1, std::vector<int>{});

  RankTensor out;
  out.global = Shape(std::move(extents));
  out.dist = TensorDistribution(std::move(lists));
  out.grid = rt.grid;
  out.rank = rt.rank;
  // The grid share rides the inner part, so the local block splits the same way.
  out.local = split_mode(rt.local, mode, inner / g);
  return out;
}

RankTensor merge_modes(const RankTensor& rt, int mode) {
  if (mode < 0 || mode + 1 >= rt.global.order()) {
    fail(Errc::InvalidMode, "cannot merge modes " + std::to_string(mode) + "," +
                                std::to_string(mode + 1) + " of " + rt.global.str());
  }
  if (!rt.dist.modes_for(mode + 1).empty()) {
    fail(Errc::ShapeMismatch, "merging a distributed outer mode would need a blocked distribution");
  }
  std::vector<std::int64_t> extents = rt.global.extents();
  extents[static_cast<std::size_t>(mode)] *= extents[static_cast<std::size_t>(mode) + 1];
  extents.erase(extents.begin() + mode + 1);

  std::vector<std::vector<int>> lists = rt.dist.mode_dists();
  lists.erase(lists.begin() + mode + 1);

  RankTensor out;
  out.global = Shape(std::move(extents));
  out.dist = TensorDistribution(std::move(lists));
  out.grid = rt.grid;
  out.rank = rt.rank;
  out.local = merge_modes(rt.local, mode);
  return out;
}

}  // namespace gridfft
