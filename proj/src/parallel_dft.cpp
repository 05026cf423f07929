#include "gridfft/parallel_dft.hpp"

#include <cmath>
#include <numbers>

namespace gridfft {

namespace {

struct AlgoRankOut {
  Tensor local;
  Shape out_global;
  TensorDistribution out_dist;
  std::vector<std::string> trail;
};

TensorDistribution dist_of(std::vector<std::vector<int>> lists) {
  return TensorDistribution(std::move(lists));
}

// Multiply every element by w_n^{row * col}, where row is the global index
// behind local mode `row_mode` (start + local*step) and col is the local
// index of `col_mode`. This is the twiddle stage, generated per rank for the
// rows it owns.
void apply_twiddle_pair(Tensor& t, int row_mode, int col_mode, std::int64_t n,
                        std::int64_t row_start, std::int64_t row_step) {
  const std::int64_t rows = t.shape()[row_mode];
  const std::int64_t cols = t.shape()[col_mode];
  Tensor table{Shape{rows, cols}};
  auto tw = table.data();
  for (std::int64_t k = 0; k < cols; ++k) {
    for (std::int64_t l = 0; l < rows; ++l) {
      const std::int64_t exponent = ((row_start + l * row_step) % n) * k % n;
      tw[static_cast<std::size_t>(l + rows * k)] =
          std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(exponent) / static_cast<double>(n));
    }
  }

  const int order = t.shape().order();
  std::vector<std::int64_t> index(static_cast<std::size_t>(order), 0);
  auto data = t.data();
  for (std::int64_t off = 0; off < t.size(); ++off) {
    const std::int64_t l = index[static_cast<std::size_t>(row_mode)];
    const std::int64_t k = index[static_cast<std::size_t>(col_mode)];
    data[static_cast<std::size_t>(off)] *= tw[static_cast<std::size_t>(l + rows * k)];
    for (int m = 0; m < order; ++m) {
      if (++index[static_cast<std::size_t>(m)] < t.shape()[m]) break;
      index[static_cast<std::size_t>(m)] = 0;
    }
  }
}

ParallelRun finish_run(const Grid& grid, SpawnReport<AlgoRankOut>&& report) {
  const auto& first = report.results.front();
  for (const auto& r : report.results) {
    if (r.out_global != first.out_global || !(r.out_dist == first.out_dist) ||
        r.trail != first.trail) {
      fail(Errc::ProgramError, "ranks disagree on the output layout");
    }
  }
  std::vector<Tensor> locals;
  locals.reserve(report.results.size());
  for (auto& r : report.results) locals.push_back(std::move(r.local));
  return ParallelRun{DistTensor(first.out_global, first.out_dist, grid, std::move(locals)),
                     std::move(report.logs), first.trail};
}

void require_dist(const DistTensor& dt, const TensorDistribution& expected, const char* alg) {
  if (!(dt.dist() == expected)) {
    fail(Errc::ShapeMismatch, std::string(alg) + " expects layout " + expected.str() + ", got " +
                                  dt.dist().str());
  }
}

void require_grid_order(const Grid& grid, int order, const char* alg) {
  if (grid.order() != order) {
    fail(Errc::GridMismatch, std::string(alg) + " needs an order-" + std::to_string(order) +
                                 " grid, got " + grid.shape().str());
  }
}

std::pair<std::int64_t, std::int64_t> resolve_factor(const std::vector<ModeFactor>& factors,
                                                     std::size_t dim, std::int64_t n,
                                                     std::int64_t ranks) {
  if (dim < factors.size() && factors[dim]) {
    const auto [a, b] = *factors[dim];
    if (a < 1 || b < 1 || a * b != n || a % ranks != 0 || b % ranks != 0) {
      fail(Errc::ShapeMismatch, "factorization " + std::to_string(a) + "*" + std::to_string(b) +
                                    " invalid for extent " + std::to_string(n) + " on " +
                                    std::to_string(ranks) + " ranks");
    }
    return {a, b};
  }
  return balanced_factor_pair(n, ranks);
}

}  // namespace

ParallelRun dft1d_sixstep(const DistTensor& x, const SpawnOptions& opts) {
  require_grid_order(x.grid(), 1, "sixstep");
  require_dist(x, dist_of({{}, {}, {0}}), "sixstep");
  const std::int64_t p = x.grid().size();
  if (x.global_shape().order() != 3 || x.global_shape()[2] != p) {
    fail(Errc::ShapeMismatch, "sixstep input must be (rows, cols/p, p), got " +
                                  x.global_shape().str());
  }
  const std::int64_t rows = x.global_shape()[0];
  const std::int64_t block = x.global_shape()[1];  // cols / p
  const std::int64_t cols = block * p;
  const std::int64_t n = rows * cols;
  if (rows % p != 0) {
    fail(Errc::ShapeMismatch, std::to_string(p) + " ranks do not divide row extent " +
                                  std::to_string(rows));
  }
  const std::int64_t row_block = rows / p;

  auto report = spawn_traced<AlgoRankOut>(
      x.grid(),
      [&](RankContext& ctx) {
        const int r = ctx.rank();
        AlgoRankOut out;
        RankTensor rt = rank_view(x, r);

        rt = split_mode(rt, 0, row_block);  // (row_block, p, block, p) [(),(),(),(0)]
        rt = redistribute(std::move(rt), dist_of({{}, {0}, {}, {}}), ctx, "redistribute-in");
        out.trail.push_back(rt.dist.str());

        // Rows block r with columns in natural order.
        Tensor m = reshape(rt.local, Shape{row_block, cols});
        m = batch_dft_mode(m, 1);
        apply_twiddle_pair(m, 0, 1, n, r * row_block, 1);
        rt.local = reshape(m, Shape{row_block, 1, block, p});

        rt = redistribute(std::move(rt), dist_of({{}, {}, {}, {0}}), ctx, "global-transpose");
        out.trail.push_back(rt.dist.str());

        // All rows, my contiguous column block; transpose locally and finish.
        Tensor t2 = transpose(reshape(rt.local, Shape{rows, block}), std::array<int, 2>{1, 0});
        t2 = batch_dft_mode(t2, 1);

        rt.global = Shape{block, p, row_block, p};
        rt.dist = dist_of({{}, {0}, {}, {}});
        rt.local = reshape(t2, Shape{block, 1, row_block, p});

        rt = redistribute(std::move(rt), dist_of({{}, {}, {}, {0}}), ctx, "redistribute-out");
        out.trail.push_back(rt.dist.str());
        rt = merge_modes(rt, 0);  // (cols, row_block, p) [(),(),(0)]

        out.local = std::move(rt.local);
        out.out_global = rt.global;
        out.out_dist = rt.dist;
        return out;
      },
      opts);
  return finish_run(x.grid(), std::move(report));
}

ParallelRun dft1d_cyclic(const DistTensor& x, const SpawnOptions& opts) {
  require_grid_order(x.grid(), 1, "cyclic");
  require_dist(x, dist_of({{0}, {}}), "cyclic");
  const std::int64_t p = x.grid().size();
  const std::int64_t rows = x.global_shape()[0];
  const std::int64_t cols = x.global_shape()[1];
  if (rows % p != 0 || cols % p != 0) {
    fail(Errc::ShapeMismatch, "cyclic needs p | rows and p | cols, got " +
                                  x.global_shape().str() + " on p = " + std::to_string(p));
  }
  const std::int64_t n = rows * cols;

  auto report = spawn_traced<AlgoRankOut>(
      x.grid(),
      [&](RankContext& ctx) {
        const int r = ctx.rank();
        AlgoRankOut out;
        RankTensor rt = rank_view(x, r);

        rt.local = batch_dft_mode(rt.local, 1);
        // Twiddle rows carry the input's cyclic distribution: global row
        // behind local row l is l*p + r.
        apply_twiddle_pair(rt.local, 0, 1, n, r, p);

        rt = redistribute(std::move(rt), dist_of({{}, {0}}), ctx, "transpose");
        out.trail.push_back(rt.dist.str());

        rt = transpose(rt, std::array<int, 2>{1, 0});
        rt.local = batch_dft_mode(rt.local, 1);

        out.local = std::move(rt.local);
        out.out_global = rt.global;
        out.out_dist = rt.dist;
        return out;
      },
      opts);
  return finish_run(x.grid(), std::move(report));
}

ParallelRun dft3d_slab(const DistTensor& cube, OutputMode output_mode, const SpawnOptions& opts) {
  require_grid_order(cube.grid(), 1, "slab");
  require_dist(cube, dist_of({{}, {}, {0}}), "slab");
  if (cube.global_shape().order() != 3) {
    fail(Errc::ShapeMismatch, "slab expects a 3D cube, got " + cube.global_shape().str());
  }
  const std::int64_t p = cube.grid().size();
  const std::int64_t plane = cube.global_shape()[0] * cube.global_shape()[1];
  if (plane % p != 0) {
    fail(Errc::ShapeMismatch, std::to_string(p) + " ranks do not divide the slab plane " +
                                  std::to_string(plane));
  }
  const std::int64_t front = cube.global_shape()[0];

  auto report = spawn_traced<AlgoRankOut>(
      cube.grid(),
      [&](RankContext& ctx) {
        AlgoRankOut out;
        RankTensor rt = rank_view(cube, ctx.rank());

        // 2D transform on every owned slab.
        rt.local = batch_dft_mode(batch_dft_mode(rt.local, 0), 1);

        rt = merge_modes(rt, 0);  // (n0*n1, n2) [(),(0)]
        rt = redistribute(std::move(rt), dist_of({{0}, {}}), ctx, "pencil-exchange");
        out.trail.push_back(rt.dist.str());

        rt.local = batch_dft_mode(rt.local, 1);

        if (output_mode == OutputMode::Natural) {
          rt = redistribute(std::move(rt), dist_of({{}, {0}}), ctx, "store-order");
          out.trail.push_back(rt.dist.str());
          rt = split_mode(rt, 0, front);  // back to (n0,n1,n2) [(),(),(0)]
        }

        out.local = std::move(rt.local);
        out.out_global = rt.global;
        out.out_dist = rt.dist;
        return out;
      },
      opts);
  return finish_run(cube.grid(), std::move(report));
}

ParallelRun dft3d_pencil(const DistTensor& cube, OutputMode output_mode, const SpawnOptions& opts) {
  require_grid_order(cube.grid(), 2, "pencil");
  require_dist(cube, dist_of({{}, {0}, {1}}), "pencil");
  if (cube.global_shape().order() != 3) {
    fail(Errc::ShapeMismatch, "pencil expects a 3D cube, got " + cube.global_shape().str());
  }
  for (int g = 0; g < 2; ++g) {
    for (int m = 0; m < 3; ++m) {
      if (cube.global_shape()[m] % cube.grid().shape()[g] != 0) {
        fail(Errc::ShapeMismatch, "grid extent " + std::to_string(cube.grid().shape()[g]) +
                                      " does not divide cube extent " +
                                      std::to_string(cube.global_shape()[m]));
      }
    }
  }

  auto report = spawn_traced<AlgoRankOut>(
      cube.grid(),
      [&](RankContext& ctx) {
        AlgoRankOut out;
        RankTensor rt = rank_view(cube, ctx.rank());
        const std::array<int, 3> rotate{1, 2, 0};

        for (int phase = 0; phase < 3; ++phase) {
          rt.local = batch_dft_mode(rt.local, 0);

          // Hand the finished dimension the grid mode of the next one, then
          // rotate the cube so the next dimension becomes local mode 0.
          const int moving = phase == 1 ? 1 : 0;
          auto lists = rt.dist.mode_dists();
          for (int m = 1; m < 3; ++m) {
            if (!lists[static_cast<std::size_t>(m)].empty() &&
                lists[static_cast<std::size_t>(m)].back() == moving) {
              lists[static_cast<std::size_t>(m)].pop_back();
            }
          }
          lists[0].push_back(moving);
          rt = redistribute(std::move(rt), TensorDistribution(std::move(lists)), ctx,
                            "rotate-" + std::to_string(phase));
          rt = transpose(rt, rotate);
          out.trail.push_back(rt.dist.str());
        }

        if (output_mode == OutputMode::Natural) {
          rt = redistribute_world(std::move(rt), dist_of({{}, {0}, {1}}), ctx, "reorder");
          out.trail.push_back(rt.dist.str());
        }

        out.local = std::move(rt.local);
        out.out_global = rt.global;
        out.out_dist = rt.dist;
        return out;
      },
      opts);
  return finish_run(cube.grid(), std::move(report));
}

ParallelRun dft3d_volumetric(const DistTensor& cube, const std::vector<ModeFactor>& factors,
                             const SpawnOptions& opts) {
  require_grid_order(cube.grid(), 3, "volumetric");
  require_dist(cube, dist_of({{0}, {1}, {2}}), "volumetric");
  if (cube.global_shape().order() != 3) {
    fail(Errc::ShapeMismatch, "volumetric expects a 3D cube, got " + cube.global_shape().str());
  }
  std::array<std::pair<std::int64_t, std::int64_t>, 3> split;
  for (int d = 0; d < 3; ++d) {
    split[static_cast<std::size_t>(d)] = resolve_factor(factors, static_cast<std::size_t>(d),
                                                        cube.global_shape()[d],
                                                        cube.grid().shape()[d]);
  }

  auto report = spawn_traced<AlgoRankOut>(
      cube.grid(),
      [&](RankContext& ctx) {
        AlgoRankOut out;
        RankTensor rt = rank_view(cube, ctx.rank());
        const auto coords = cube.grid().coords(ctx.rank());

        for (int d = 0; d < 3; ++d) {
          const auto [a, b] = split[static_cast<std::size_t>(d)];
          const std::int64_t n = a * b;
          const std::int64_t ranks = cube.grid().shape()[d];

          // Cyclic 1D transform embedded in dimension d; everything except
          // the one exchange stays inside this rank.
          rt = split_mode(rt, d, a);
          rt.local = batch_dft_mode(rt.local, d + 1);
          apply_twiddle_pair(rt.local, d, d + 1, n, coords[static_cast<std::size_t>(d)], ranks);

          auto lists = rt.dist.mode_dists();
          lists[static_cast<std::size_t>(d)].clear();
          lists[static_cast<std::size_t>(d) + 1].push_back(d);
          rt = redistribute(std::move(rt), TensorDistribution(std::move(lists)), ctx,
                            "dim-" + std::to_string(d));

          std::vector<int> swap(static_cast<std::size_t>(rt.global.order()));
          for (std::size_t m = 0; m < swap.size(); ++m) swap[m] = static_cast<int>(m);
          std::swap(swap[static_cast<std::size_t>(d)], swap[static_cast<std::size_t>(d) + 1]);
          rt = transpose(rt, swap);

          rt.local = batch_dft_mode(rt.local, d + 1);
          rt = merge_modes(rt, d);
          out.trail.push_back(rt.dist.str());
        }

        out.local = std::move(rt.local);
        out.out_global = rt.global;
        out.out_dist = rt.dist;
        return out;
      },
      opts);
  return finish_run(cube.grid(), std::move(report));
}

DistTensor make_initial_layout(const DftProblem& problem, AlgorithmKind kind, const Grid& grid,
                               const Tensor& input) {
  require_grid_order(grid, grid_order_for(kind), algorithm_name(kind).data());
  if (input.shape() != problem.dims) {
    fail(Errc::ShapeMismatch, "input " + input.shape().str() + " does not match problem dims " +
                                  problem.dims.str());
  }
  switch (kind) {
    case AlgorithmKind::Sixstep1d:
    case AlgorithmKind::Cyclic1d: {
      if (problem.dims.order() != 1) {
        fail(Errc::ShapeMismatch, "1D algorithms need dims (n), got " + problem.dims.str());
      }
      const std::int64_t n = problem.dims[0];
      const std::int64_t p = grid.size();
      const auto [rows, cols] = resolve_factor(problem.factors, 0, n, p);
      if (kind == AlgorithmKind::Cyclic1d) {
        return scatter_global(reshape(input, Shape{rows, cols}), parse_dist("[(0),()]"), grid);
      }
      return scatter_global(reshape(input, Shape{rows, cols / p, p}), parse_dist("[(),(),(0)]"),
                            grid);
    }
    case AlgorithmKind::SlabPencil:
      return scatter_global(input, parse_dist("[(),(),(0)]"), grid);
    case AlgorithmKind::PencilPencilPencil:
      return scatter_global(input, parse_dist("[(),(0),(1)]"), grid);
    case AlgorithmKind::Volumetric:
      return scatter_global(input, parse_dist("[(0),(1),(2)]"), grid);
  }
  fail(Errc::UnsupportedAlgorithm, "unknown algorithm");
}

DftRun run_parallel_dft(const DftProblem& problem, AlgorithmKind kind, const Grid& grid,
                        const Tensor& input, const SpawnOptions& opts) {
  const DistTensor laid_out = make_initial_layout(problem, kind, grid, input);
  ParallelRun run = [&] {
    switch (kind) {
      case AlgorithmKind::Sixstep1d: return dft1d_sixstep(laid_out, opts);
      case AlgorithmKind::Cyclic1d: return dft1d_cyclic(laid_out, opts);
      case AlgorithmKind::SlabPencil: return dft3d_slab(laid_out, problem.output_mode, opts);
      case AlgorithmKind::PencilPencilPencil:
        return dft3d_pencil(laid_out, problem.output_mode, opts);
      case AlgorithmKind::Volumetric: return dft3d_volumetric(laid_out, problem.factors, opts);
    }
    fail(Errc::UnsupportedAlgorithm, "unknown algorithm");
  }();
  Tensor gathered = reshape(gather_global(run.output), problem.dims);
  return DftRun{std::move(run), std::move(gathered)};
}

int expected_collectives(AlgorithmKind kind, const Grid& grid, OutputMode output_mode) {
  auto active = [&](int mode) { return grid.shape()[mode] > 1 ? 1 : 0; };
  const int world_active = grid.size() > 1 ? 1 : 0;
  switch (kind) {
    case AlgorithmKind::Sixstep1d: return 3 * active(0);
    case AlgorithmKind::Cyclic1d: return active(0);
    case AlgorithmKind::SlabPencil:
      return active(0) * (output_mode == OutputMode::Natural ? 2 : 1);
    case AlgorithmKind::PencilPencilPencil:
      return 2 * active(0) + active(1) +
             (output_mode == OutputMode::Natural ? world_active : 0);
    case AlgorithmKind::Volumetric: return active(0) + active(1) + active(2);
  }
  return 0;
}

}  // namespace gridfft
