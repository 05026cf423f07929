#pragma once

#include <cstdint>
#include <span>

#include "gridfft/cost_model.hpp"
#include "gridfft/parallel_dft.hpp"

namespace gridfft {

/// Everything one verification or sweep run needs. Mirrored one-to-one by
/// the JSON config file format.
struct RunConfig {
  Shape dims{8, 8, 8};
  AlgorithmKind alg = AlgorithmKind::Volumetric;
  Shape grid{2, 2, 2};
  OutputMode output = OutputMode::Natural;
  std::uint64_t seed = 12345;
  CostParams params{};
  int repetitions = 3;
  bool force = false;
  ScheduleMode schedule = ScheduleMode::Concurrent;
};

RunConfig run_config_from_json(const std::string& text);

/// Simulated runs refuse problems above this element count unless forced.
inline constexpr std::int64_t kDeskScaleLimit = std::int64_t{1} << 22;

/// Seeded complex input with re/im uniform in [-1, 1), generated by
/// mt19937_64 independent of platform library distributions.
Tensor random_input(const Shape& dims, std::uint64_t seed);

double rel_l2_error(std::span<const cplx> got, std::span<const cplx> want);

inline constexpr double kOracleTolerance = 1e-10;

struct StageLine {
  std::string stage;
  std::string kind;
  int count = 0;             // per-rank occurrences (identical on all ranks)
  std::size_t total_bytes = 0;  // summed over ranks
};

struct VerifyReport {
  RunConfig config;
  bool pass = false;
  double rel_err = 0.0;
  int collectives = 0;
  int expected = 0;
  std::vector<StageLine> stages;
  std::vector<std::string> stage_dists;
  double simulator_seconds = 0.0;  // mean over repetitions, simulator wall time
  std::string trace;               // JSON lines, one record per rank event

  std::string text() const;
};

/// Run the algorithm under the simulated communicator, gather, and compare
/// against the sequential reference transform.
VerifyReport cmd_verify(const RunConfig& config);

struct AdviseReport {
  Shape dims;
  std::int64_t ranks = 0;
  CostParams params;
  std::vector<AdviceRow> rows;

  std::string text() const;
  std::string csv() const;
};

AdviseReport cmd_advise(const Shape& dims, std::int64_t ranks, const CostParams& params);

struct SweepRow {
  std::int64_t ranks = 0;
  Shape grid;
  AlgorithmKind alg = AlgorithmKind::SlabPencil;
  int stages = 0;  // exchanges the run performs at this configuration
  CostEstimate model;
  bool simulated = false;
  int sim_collectives = 0;
  std::size_t sim_bytes = 0;
  double max_rel_err = 0.0;
  bool ok = true;
  std::string note;  // failure note, never part of the CSV
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool any_ok = false;
  std::string trace;

  std::string csv() const;
};

/// One row per feasible (algorithm, grid) pair drawn from the grid table at
/// each requested rank count; simulated columns are filled only when the
/// problem is desk-scale (or forced) and the run succeeds.
SweepReport cmd_sweep(const Shape& dims, std::span<const std::int64_t> rank_counts,
                      const RunConfig& base);

}  // namespace gridfft
