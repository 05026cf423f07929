#include "gridfft/redistribute.hpp"

#include <algorithm>
#include <tuple>

namespace gridfft {

namespace {

// True when `longer` equals `shorter` with exactly one extra entry at the end.
bool is_tail_extension(std::span<const int> shorter, std::span<const int> longer, int* moved) {
  if (longer.size() != shorter.size() + 1) return false;
  for (std::size_t i = 0; i < shorter.size(); ++i) {
    if (shorter[i] != longer[i]) return false;
  }
  *moved = longer.back();
  return true;
}

struct Route {
  int group_size = 1;
  // group position of a world rank inside the exchanging communicator
  std::function<int(int)> pos_of;
};

std::vector<ComplexVec> pack_generic(const Tensor& local, const Shape& global,
                                     const TensorDistribution& src, const TensorDistribution& dst,
                                     const Grid& grid, int rank, const Route& route) {
  const Shape src_local = local_shape(global, src, grid);
  if (local.shape() != src_local) {
    fail(Errc::ShapeMismatch, "local block " + local.shape().str() + " does not match " +
                                  src_local.str() + " under " + src.str());
  }
  const Shape dst_local = local_shape(global, dst, grid);

  struct Entry {
    int dest;
    std::int64_t offset;
    cplx value;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(local.size()));

  const int order = global.order();
  std::vector<std::int64_t> index(static_cast<std::size_t>(order), 0);
  auto data = local.data();
  for (std::int64_t off = 0; off < local.size(); ++off) {
    const auto global_index = global_index_of(index, src, grid, rank, global);
    const Placement p = owner_of(global_index, dst, grid, global);
    entries.push_back({route.pos_of(p.rank), linearize(p.local_index, dst_local),
                       data[static_cast<std::size_t>(off)]});
    for (int m = 0; m < order; ++m) {
      if (++index[static_cast<std::size_t>(m)] < local.shape()[m]) break;
      index[static_cast<std::size_t>(m)] = 0;
    }
  }

  // Destination ranks ascending; within one destination, destination-local
  // column-major order. This is the byte-exact packing contract.
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.dest, a.offset) < std::tie(b.dest, b.offset);
  });

  std::vector<ComplexVec> buffers(static_cast<std::size_t>(route.group_size));
  for (const auto& e : entries) buffers[static_cast<std::size_t>(e.dest)].push_back(e.value);
  return buffers;
}

Tensor unpack_generic(std::vector<ComplexVec> received, const Shape& global,
                      const TensorDistribution& src, const TensorDistribution& dst,
                      const Grid& grid, int rank, const Route& route) {
  if (static_cast<int>(received.size()) != route.group_size) {
    fail(Errc::SizeMismatch, "expected " + std::to_string(route.group_size) + " buffers, got " +
                                 std::to_string(received.size()));
  }
  const Shape dst_local = local_shape(global, dst, grid);
  Tensor out{dst_local};
  auto data = out.data();
  std::vector<std::size_t> cursor(received.size(), 0);

  const int order = global.order();
  std::vector<std::int64_t> index(static_cast<std::size_t>(order), 0);
  for (std::int64_t off = 0; off < out.size(); ++off) {
    const auto global_index = global_index_of(index, dst, grid, rank, global);
    const Placement p = owner_of(global_index, src, grid, global);
    const auto s = static_cast<std::size_t>(route.pos_of(p.rank));
    if (cursor[s] >= received[s].size()) {
      fail(Errc::SizeMismatch, "buffer from group position " + std::to_string(s) + " too short");
    }
    data[static_cast<std::size_t>(off)] = received[s][cursor[s]++];
    for (int m = 0; m < order; ++m) {
      if (++index[static_cast<std::size_t>(m)] < out.shape()[m]) break;
      index[static_cast<std::size_t>(m)] = 0;
    }
  }
  for (std::size_t s = 0; s < received.size(); ++s) {
    if (cursor[s] != received[s].size()) {
      fail(Errc::SizeMismatch, "buffer from group position " + std::to_string(s) + " not fully consumed");
    }
  }
  return out;
}

Route mode_route(const Grid& grid, int comm_mode) {
  Route route;
  route.group_size = static_cast<int>(grid.shape()[comm_mode]);
  route.pos_of = [&grid, comm_mode](int rank) {
    return static_cast<int>(grid.coords(rank)[static_cast<std::size_t>(comm_mode)]);
  };
  return route;
}

Route world_route(const Grid& grid) {
  Route route;
  route.group_size = grid.size();
  route.pos_of = [](int rank) { return rank; };
  return route;
}

}  // namespace

RedistPlan plan_redist(const TensorDistribution& src, const TensorDistribution& dst,
                       const Grid& grid, const Shape& global_shape) {
  validate_distribution(global_shape, src, grid);
  validate_distribution(global_shape, dst, grid);

  RedistPlan plan;
  plan.global = global_shape;
  plan.src = src;
  plan.dst = dst;
  plan.grid = grid;

  if (src == dst) {
    plan.kind = RedistKind::LocalOnly;
    return plan;
  }

  std::vector<int> changed;
  for (int m = 0; m < src.order(); ++m) {
    if (src.mode_dists()[static_cast<std::size_t>(m)] != dst.mode_dists()[static_cast<std::size_t>(m)]) {
      changed.push_back(m);
    }
  }
  if (changed.size() == 2) {
    for (int flip = 0; flip < 2; ++flip) {
      const int from = changed[flip == 0 ? 0 : 1];
      const int to = changed[flip == 0 ? 1 : 0];
      int released = -1;
      int gained = -1;
      if (is_tail_extension(dst.modes_for(from), src.modes_for(from), &released) &&
          is_tail_extension(src.modes_for(to), dst.modes_for(to), &gained) && released == gained) {
        plan.src_tensor_mode = from;
        plan.dst_tensor_mode = to;
        plan.comm_mode = released;
        plan.kind = grid.shape()[released] == 1 ? RedistKind::LocalOnly : RedistKind::AllToAllOverMode;
        return plan;
      }
    }
  }
  fail(Errc::UnsupportedRedist,
       src.str() + " -> " + dst.str() + " is not a single grid-mode move");
}

std::vector<ComplexVec> pack(const Tensor& local, const RedistPlan& plan, int rank) {
  if (plan.kind != RedistKind::AllToAllOverMode) {
    fail(Errc::UnsupportedRedist, "pack expects an all-to-all plan");
  }
  return pack_generic(local, plan.global, plan.src, plan.dst, plan.grid, rank,
                      mode_route(plan.grid, plan.comm_mode));
}

Tensor unpack(std::vector<ComplexVec> received, const RedistPlan& plan, int rank) {
  if (plan.kind != RedistKind::AllToAllOverMode) {
    fail(Errc::UnsupportedRedist, "unpack expects an all-to-all plan");
  }
  return unpack_generic(std::move(received), plan.global, plan.src, plan.dst, plan.grid, rank,
                        mode_route(plan.grid, plan.comm_mode));
}

RankTensor redistribute(RankTensor rt, const TensorDistribution& dst, RankContext& ctx,
                        const std::string& stage_label) {
  const RedistPlan plan = plan_redist(rt.dist, dst, rt.grid, rt.global);
  if (plan.kind == RedistKind::LocalOnly) {
    // No element changes owner or local offset; only the labeling moves.
    rt.dist = dst;
    return rt;
  }
  if (!stage_label.empty()) ctx.set_stage(stage_label);
  auto send = pack(rt.local, plan, rt.rank);
  auto recv = ctx.split(plan.comm_mode).all_to_all(std::move(send));
  rt.local = unpack(std::move(recv), plan, rt.rank);
  rt.dist = dst;
  return rt;
}

RankTensor redistribute_world(RankTensor rt, const TensorDistribution& dst, RankContext& ctx,
                              const std::string& stage_label) {
  validate_distribution(rt.global, dst, rt.grid);
  if (rt.dist == dst) return rt;
  if (rt.grid.size() == 1) {
    rt.dist = dst;
    return rt;
  }
  if (!stage_label.empty()) ctx.set_stage(stage_label);
  const Route route = world_route(rt.grid);
  auto send = pack_generic(rt.local, rt.global, rt.dist, dst, rt.grid, rt.rank, route);
  auto recv = ctx.world().all_to_all(std::move(send));
  rt.local = unpack_generic(std::move(recv), rt.global, rt.dist, dst, rt.grid, rt.rank, route);
  rt.dist = dst;
  return rt;
}

DistTensor execute_redist(const DistTensor& dt, const TensorDistribution& dst,
                          const SpawnOptions& opts) {
  // Plan once up front so unsupported changes surface before any worker runs.
  plan_redist(dt.dist(), dst, dt.grid(), dt.global_shape());
  auto report = spawn_traced<Tensor>(
      dt.grid(),
      [&](RankContext& ctx) {
        RankTensor rt = rank_view(dt, ctx.rank());
        rt = redistribute(std::move(rt), dst, ctx, "redistribute");
        return std::move(rt.local);
      },
      opts);
  return DistTensor(dt.global_shape(), dst, dt.grid(), std::move(report.results));
}

}  // namespace gridfft
