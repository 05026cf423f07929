#include "gridfft/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gridfft {

namespace {

void check_params(const CostParams& params) {
  if (!(params.alpha > 0.0) || !(params.beta >= 0.0) || params.ports < 1) {
    fail(Errc::InvalidParams, "need alpha > 0, beta >= 0, ports >= 1");
  }
}

void check_stage_args(std::int64_t ranks, std::int64_t elements) {
  if (ranks < 1 || elements < 0) {
    fail(Errc::InvalidParams, "ranks " + std::to_string(ranks) + ", elements " +
                                  std::to_string(elements));
  }
}

CostEstimate single_stage(double latency, double bandwidth, std::int64_t ranks,
                          std::int64_t elements, const char* variant) {
  CostEstimate est;
  est.latency = latency;
  est.bandwidth = bandwidth;
  est.total = latency + bandwidth;
  est.stages.push_back({"all-to-all", ranks, elements, latency, bandwidth, latency + bandwidth,
                        variant});
  return est;
}

}  // namespace

CostEstimate cost_mst(std::int64_t ranks, std::int64_t elements, const CostParams& params) {
  check_params(params);
  check_stage_args(ranks, elements);
  const double k1 = static_cast<double>(params.ports) + 1.0;
  const double steps = std::log2(static_cast<double>(ranks)) / std::log2(k1);
  const double latency = steps * params.alpha;
  const double bandwidth =
      steps * static_cast<double>(elements) / (k1 * static_cast<double>(ranks)) * params.beta;
  return single_stage(latency, bandwidth, ranks, elements, "mst");
}

CostEstimate cost_bkt(std::int64_t ranks, std::int64_t elements, const CostParams& params) {
  check_params(params);
  check_stage_args(ranks, elements);
  const std::int64_t steps = (ranks - 1 + params.ports - 1) / params.ports;  // ceil((p-1)/k)
  const double latency = static_cast<double>(steps) * params.alpha;
  const double bandwidth = static_cast<double>(steps) * static_cast<double>(elements) /
                           (static_cast<double>(ranks) * static_cast<double>(ranks)) * params.beta;
  return single_stage(latency, bandwidth, ranks, elements, "bkt");
}

std::int64_t latency_threshold(AllToAllVariant variant, std::int64_t elements,
                               const CostParams& params) {
  check_params(params);
  if (elements < 1) fail(Errc::InvalidParams, "elements " + std::to_string(elements));
  const double load = static_cast<double>(elements) * params.beta / params.alpha;
  if (variant == AllToAllVariant::Mst) {
    const double bound = load / (static_cast<double>(params.ports) + 1.0);
    const auto p = static_cast<std::int64_t>(std::ceil(bound));
    return std::max<std::int64_t>(1, p);
  }
  // smallest p with p*p >= load
  std::int64_t p = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(std::sqrt(load))));
  while (static_cast<double>(p) * static_cast<double>(p) < load) ++p;
  while (p > 1 && static_cast<double>(p - 1) * static_cast<double>(p - 1) >= load) --p;
  return p;
}

std::int64_t max_procs(AlgorithmKind kind, const Shape& dims) {
  if (dims.order() != 3) {
    fail(Errc::ShapeMismatch, "parallelism caps are defined on 3D dims, got " + dims.str());
  }
  const std::int64_t n0 = dims[0];
  const std::int64_t n1 = dims[1];
  const std::int64_t n2 = dims[2];
  switch (kind) {
    case AlgorithmKind::SlabPencil:
      return std::max({n0, n1, n2});
    case AlgorithmKind::PencilPencilPencil:
      return std::max({n0 * n1, n1 * n2, n0 * n2});
    case AlgorithmKind::Volumetric:
      return n0 * n1 * n2;
    case AlgorithmKind::Sixstep1d:
    case AlgorithmKind::Cyclic1d:
      fail(Errc::UnsupportedAlgorithm,
           "no parallelism cap defined for 1D algorithm " + std::string(algorithm_name(kind)));
  }
  fail(Errc::UnsupportedAlgorithm, "unknown algorithm");
}

namespace {

StageCost cheaper_stage(std::string label, std::int64_t ranks, std::int64_t elements,
                        const CostParams& params) {
  const CostEstimate mst = cost_mst(ranks, elements, params);
  const CostEstimate bkt = cost_bkt(ranks, elements, params);
  const bool mst_wins = mst.total <= bkt.total;
  const CostEstimate& pick = mst_wins ? mst : bkt;
  return {std::move(label), ranks,         elements, pick.latency, pick.bandwidth,
          pick.total,       mst_wins ? "mst" : "bkt"};
}

}  // namespace

CostEstimate estimate_algorithm(AlgorithmKind kind, const Shape& dims, const Shape& grid_shape,
                                const CostParams& params) {
  check_params(params);
  if (grid_shape.order() != grid_order_for(kind)) {
    fail(Errc::GridMismatch, std::string(algorithm_name(kind)) + " needs an order-" +
                                 std::to_string(grid_order_for(kind)) + " grid, got " +
                                 grid_shape.str());
  }
  const std::int64_t total_ranks = grid_shape.count();
  if (total_ranks > max_procs(kind, dims)) {
    fail(Errc::GridMismatch, std::to_string(total_ranks) + " ranks exceed the cap " +
                                 std::to_string(max_procs(kind, dims)));
  }
  const std::int64_t volume = dims.count();

  CostEstimate est;
  auto add_stage = [&](std::string label, std::int64_t ranks) {
    // Each stage exchanges the cube share held by its rank set.
    const std::int64_t elements = volume * ranks / total_ranks;
    StageCost stage = cheaper_stage(std::move(label), ranks, elements, params);
    est.latency += stage.latency;
    est.bandwidth += stage.bandwidth;
    est.total += stage.total;
    est.stages.push_back(std::move(stage));
  };

  switch (kind) {
    case AlgorithmKind::SlabPencil:
      add_stage("exchange", grid_shape[0]);
      break;
    case AlgorithmKind::PencilPencilPencil:
      add_stage("rotate-y", grid_shape[0]);
      add_stage("rotate-z", grid_shape[1]);
      break;
    case AlgorithmKind::Volumetric:
      add_stage("dim-0", grid_shape[0]);
      add_stage("dim-1", grid_shape[1]);
      add_stage("dim-2", grid_shape[2]);
      break;
    case AlgorithmKind::Sixstep1d:
    case AlgorithmKind::Cyclic1d:
      fail(Errc::UnsupportedAlgorithm,
           "the communication model covers the 3D algorithms, not " +
               std::string(algorithm_name(kind)));
  }
  return est;
}

namespace {

struct TableRow {
  std::int64_t ranks;
  std::vector<std::int64_t> g1, g2, g3;  // empty = absent
};

// Power-of-two grids up to the 48x54x32 torus limits.
const std::vector<TableRow>& grid_table() {
  static const std::vector<TableRow> table{
      {2, {2}, {}, {}},
      {4, {4}, {2, 2}, {}},
      {8, {8}, {4, 2}, {2, 2, 2}},
      {16, {16}, {4, 4}, {4, 2, 2}},
      {32, {32}, {8, 2}, {4, 4, 2}},
      {64, {}, {8, 8}, {4, 4, 4}},
      {128, {}, {16, 8}, {8, 4, 4}},
      {256, {}, {16, 16}, {8, 8, 4}},
      {512, {}, {32, 16}, {8, 8, 8}},
      {1024, {}, {32, 32}, {16, 8, 8}},
      {2048, {}, {}, {16, 16, 8}},
      {4096, {}, {}, {16, 16, 16}},
      {8192, {}, {}, {32, 16, 16}},
      {16384, {}, {}, {32, 32, 16}},
      {32768, {}, {}, {32, 32, 32}},
  };
  return table;
}

}  // namespace

GridConfigs grid_configs(std::int64_t ranks) {
  for (const auto& row : grid_table()) {
    if (row.ranks != ranks) continue;
    GridConfigs out;
    out.ranks = ranks;
    if (!row.g1.empty()) out.grid_1d = Shape(row.g1);
    if (!row.g2.empty()) out.grid_2d = Shape(row.g2);
    if (!row.g3.empty()) out.grid_3d = Shape(row.g3);
    return out;
  }
  fail(Errc::UnsupportedCount, std::to_string(ranks) + " ranks is outside the grid table");
}

const std::vector<std::int64_t>& grid_config_counts() {
  static const std::vector<std::int64_t> counts = [] {
    std::vector<std::int64_t> out;
    for (const auto& row : grid_table()) out.push_back(row.ranks);
    return out;
  }();
  return counts;
}

std::string grid_configs_csv() {
  std::ostringstream out;
  out << "p,grid_1d,grid_2d,grid_3d\n";
  for (const auto& row : grid_table()) {
    out << row.ranks << ',';
    if (!row.g1.empty()) out << Shape(row.g1).str();
    out << ',';
    if (!row.g2.empty()) out << Shape(row.g2).str();
    out << ',';
    if (!row.g3.empty()) out << Shape(row.g3).str();
    out << '\n';
  }
  return out.str();
}

std::vector<AdviceRow> advise(const Shape& dims, std::int64_t ranks, const CostParams& params) {
  check_params(params);
  if (dims.order() != 3) {
    fail(Errc::ShapeMismatch, "advise covers 3D problems, got " + dims.str());
  }
  const GridConfigs configs = grid_configs(ranks);

  std::vector<AdviceRow> rows;
  auto consider = [&](AlgorithmKind kind, const std::optional<Shape>& grid) {
    if (!grid) return;
    if (ranks > max_procs(kind, dims)) return;
    if (!algorithm_feasible(kind, dims, *grid)) return;
    rows.push_back({kind, *grid, estimate_algorithm(kind, dims, *grid, params)});
  };
  consider(AlgorithmKind::SlabPencil, configs.grid_1d);
  consider(AlgorithmKind::PencilPencilPencil, configs.grid_2d);
  consider(AlgorithmKind::Volumetric, configs.grid_3d);

  if (rows.empty()) {
    fail(Errc::NoFeasibleConfiguration, "no algorithm/grid pair can run " + dims.str() + " on " +
                                            std::to_string(ranks) + " ranks");
  }
  std::sort(rows.begin(), rows.end(), [](const AdviceRow& a, const AdviceRow& b) {
    if (a.cost.total != b.cost.total) return a.cost.total < b.cost.total;
    if (a.cost.stages.size() != b.cost.stages.size()) {
      return a.cost.stages.size() < b.cost.stages.size();
    }
    return a.grid.order() < b.grid.order();
  });
  return rows;
}

}  // namespace gridfft
