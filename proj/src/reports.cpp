#include "gridfft/reports.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gridfft {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Shape shape_from_json(const nlohmann::json& j) {
  std::vector<std::int64_t> extents;
  for (const auto& v : j) extents.push_back(v.get<std::int64_t>());
  return Shape(std::move(extents));
}

}  // namespace

RunConfig run_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("config: ") + e.what());
  }
  RunConfig config;
  try {
    if (j.contains("dims")) config.dims = shape_from_json(j["dims"]);
    if (j.contains("alg")) config.alg = algorithm_from_name(j["alg"].get<std::string>());
    if (j.contains("grid")) config.grid = shape_from_json(j["grid"]);
    if (j.contains("output")) config.output = output_mode_from_name(j["output"].get<std::string>());
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("alpha")) config.params.alpha = j["alpha"].get<double>();
    if (j.contains("beta")) config.params.beta = j["beta"].get<double>();
    if (j.contains("ports")) config.params.ports = j["ports"].get<int>();
    if (j.contains("repetitions")) config.repetitions = j["repetitions"].get<int>();
    if (j.contains("force")) config.force = j["force"].get<bool>();
    if (j.contains("schedule")) {
      const auto s = j["schedule"].get<std::string>();
      if (s == "serial") {
        config.schedule = ScheduleMode::Serial;
      } else if (s == "concurrent") {
        config.schedule = ScheduleMode::Concurrent;
      } else {
        fail(Errc::ParseError, "schedule must be concurrent or serial, got " + s);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("config: ") + e.what());
  }
  return config;
}

Tensor random_input(const Shape& dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tensor out{dims};
  auto data = out.data();
  auto next_unit = [&rng] {
    // 53 uniform bits mapped to [0,1), then shifted to [-1,1).
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
  };
  for (auto& v : data) {
    const double re = next_unit();
    const double im = next_unit();
    v = cplx{re, im};
  }
  return out;
}

double rel_l2_error(std::span<const cplx> got, std::span<const cplx> want) {
  if (got.size() != want.size()) {
    fail(Errc::SizeMismatch, "comparing vectors of different lengths");
  }
  double err2 = 0.0;
  double ref2 = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    err2 += std::norm(got[i] - want[i]);
    ref2 += std::norm(want[i]);
  }
  if (ref2 == 0.0) return err2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(err2 / ref2);
}

namespace {

void check_desk_scale(const Shape& dims, bool force) {
  if (!force && dims.count() > kDeskScaleLimit) {
    fail(Errc::InvalidParams, "dims " + dims.str() + " exceed the desk-scale gate of " +
                                  std::to_string(kDeskScaleLimit) +
                                  " elements; pass --force to simulate anyway");
  }
}

std::vector<StageLine> stage_table(std::span<const EventLog> logs) {
  std::vector<StageLine> lines;
  if (logs.empty()) return lines;
  for (const auto& e : logs[0]) {
    StageLine* line = nullptr;
    for (auto& l : lines) {
      if (l.stage == e.stage && l.kind == e.kind) line = &l;
    }
    if (!line) {
      lines.push_back({e.stage, e.kind, 0, 0});
      line = &lines.back();
    }
    line->count += 1;
  }
  for (const auto& log : logs) {
    for (const auto& e : log) {
      for (auto& l : lines) {
        if (l.stage == e.stage && l.kind == e.kind) l.total_bytes += e.sent_bytes;
      }
    }
  }
  return lines;
}

struct SimOutcome {
  DftRun run;
  int collectives = 0;
  std::size_t bytes = 0;
  double seconds = 0.0;
};

SimOutcome simulate(const RunConfig& config, const Tensor& input) {
  DftProblem problem{config.dims, {}, config.output};
  SpawnOptions opts;
  opts.mode = config.schedule;

  const int reps = std::max(1, config.repetitions);
  std::optional<DftRun> kept;
  double seconds = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const auto start = std::chrono::steady_clock::now();
    DftRun run = run_parallel_dft(problem, config.alg, Grid{config.grid}, input, opts);
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!kept) {
      kept.emplace(std::move(run));
    } else if (run.gathered != kept->gathered) {
      fail(Errc::ProgramError, "repeated runs disagreed despite identical inputs");
    }
  }

  SimOutcome out{std::move(*kept)};
  out.seconds = seconds / reps;
  const auto& logs = out.run.run.logs;
  out.collectives = static_cast<int>(count_collectives(logs[0]));
  for (const auto& log : logs) {
    const auto count = count_collectives(log);
    if (count != static_cast<std::size_t>(out.collectives)) {
      fail(Errc::ProgramError, "ranks observed different collective counts");
    }
    for (const auto& e : log) {
      if (e.kind == "all_to_all") out.bytes += e.sent_bytes;
    }
  }
  return out;
}

}  // namespace

VerifyReport cmd_verify(const RunConfig& config) {
  check_desk_scale(config.dims, config.force);
  const Tensor input = random_input(config.dims, config.seed);
  const Tensor reference = reference_dft_nd(input);

  SimOutcome sim = simulate(config, input);

  VerifyReport report;
  report.config = config;
  report.rel_err = rel_l2_error(sim.run.gathered.data(), reference.data());
  report.collectives = sim.collectives;
  report.expected = expected_collectives(config.alg, Grid{config.grid}, config.output);
  report.stages = stage_table(sim.run.run.logs);
  report.stage_dists = sim.run.run.stage_dists;
  report.simulator_seconds = sim.seconds;
  report.trace = trace_jsonl(sim.run.run.logs);
  report.pass = report.rel_err <= kOracleTolerance && report.collectives == report.expected;
  return report;
}

std::string VerifyReport::text() const {
  std::ostringstream out;
  out << "verify dims=" << config.dims.str() << " alg=" << algorithm_name(config.alg)
      << " grid=" << config.grid.str() << " output=" << output_mode_name(config.output)
      << " seed=" << config.seed << " rng=mt19937_64\n";
  for (const auto& line : stages) {
    out << "  stage " << (line.stage.empty() ? "(unlabeled)" : line.stage) << ": " << line.kind
        << " x" << line.count << ", " << line.total_bytes << " bytes\n";
  }
  out << "  collectives: " << collectives << " (expected " << expected << ")\n";
  out << "  max rel L2 error: " << fmt_double(rel_err) << " (tolerance "
      << fmt_double(kOracleTolerance) << ")\n";
  if (!stage_dists.empty()) {
    out << "  layout trail:";
    for (const auto& d : stage_dists) out << ' ' << d;
    out << '\n';
  }
  out << "  simulator time: " << fmt_double(simulator_seconds) << " s mean over "
      << std::max(1, config.repetitions) << " runs (simulator wall time, not network time)\n";
  out << (pass ? "PASS" : "FAIL") << '\n';
  return out.str();
}

AdviseReport cmd_advise(const Shape& dims, std::int64_t ranks, const CostParams& params) {
  AdviseReport report;
  report.dims = dims;
  report.ranks = ranks;
  report.params = params;
  report.rows = advise(dims, ranks, params);
  return report;
}

std::string AdviseReport::text() const {
  std::ostringstream out;
  out << "advise dims=" << dims.str() << " p=" << ranks << " alpha=" << fmt_double(params.alpha)
      << " beta=" << fmt_double(params.beta) << " ports=" << params.ports << '\n';
  out << "  rank  algorithm   grid      stages  latency_s      bandwidth_s    total_s\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    char line[160];
    std::snprintf(line, sizeof(line), "  %-5zu %-11s %-9s %-7zu %-14.6g %-14.6g %-14.6g\n", i + 1,
                  std::string(algorithm_name(row.alg)).c_str(), row.grid.str().c_str(),
                  row.cost.stages.size(), row.cost.latency, row.cost.bandwidth, row.cost.total);
    out << line;
  }
  return out.str();
}

namespace {

const char* kSweepHeader =
    "p,grid,algorithm,stages,model_total_s,model_latency_s,model_bandwidth_s,"
    "sim_collectives,sim_bytes,max_rel_err";

std::string sweep_row_csv(const SweepRow& row) {
  std::ostringstream out;
  out << row.ranks << ',' << row.grid.str() << ',' << algorithm_name(row.alg) << ',' << row.stages
      << ',' << fmt_double(row.model.total) << ',' << fmt_double(row.model.latency) << ','
      << fmt_double(row.model.bandwidth) << ',';
  if (row.simulated) {
    out << row.sim_collectives << ',' << row.sim_bytes << ',' << fmt_double(row.max_rel_err);
  } else {
    out << ",,";
  }
  return out.str();
}

}  // namespace

std::string AdviseReport::csv() const {
  std::ostringstream out;
  out << kSweepHeader << '\n';
  for (const auto& row : rows) {
    SweepRow line;
    line.ranks = ranks;
    line.grid = row.grid;
    line.alg = row.alg;
    line.stages = static_cast<int>(row.cost.stages.size());
    line.model = row.cost;
    out << sweep_row_csv(line) << '\n';
  }
  return out.str();
}

SweepReport cmd_sweep(const Shape& dims, std::span<const std::int64_t> rank_counts,
                      const RunConfig& base) {
  if (dims.order() != 3) {
    fail(Errc::ShapeMismatch, "sweep covers 3D problems, got " + dims.str());
  }
  const bool simulate_rows = base.force || dims.count() <= kDeskScaleLimit;
  std::optional<Tensor> input;
  std::optional<Tensor> reference;
  if (simulate_rows) {
    input = random_input(dims, base.seed);
    reference = reference_dft_nd(*input);
  }

  SweepReport report;
  for (const std::int64_t p : rank_counts) {
    const GridConfigs configs = grid_configs(p);
    auto consider = [&](AlgorithmKind kind, const std::optional<Shape>& grid) {
      if (!grid) return;
      if (p > max_procs(kind, dims)) return;
      if (!algorithm_feasible(kind, dims, *grid)) return;

      SweepRow row;
      row.ranks = p;
      row.grid = *grid;
      row.alg = kind;
      row.stages = expected_collectives(kind, Grid{*grid}, base.output);
      row.model = estimate_algorithm(kind, dims, *grid, base.params);
      if (simulate_rows) {
        try {
          RunConfig config = base;
          config.dims = dims;
          config.alg = kind;
          config.grid = *grid;
          SimOutcome sim = simulate(config, *input);
          row.simulated = true;
          row.sim_collectives = sim.collectives;
          row.sim_bytes = sim.bytes;
          row.max_rel_err = rel_l2_error(sim.run.gathered.data(), reference->data());
          report.trace += trace_jsonl(sim.run.run.logs);
        } catch (const Error& e) {
          row.ok = false;
          row.note = e.what();
        }
      }
      report.rows.push_back(std::move(row));
    };
    consider(AlgorithmKind::SlabPencil, configs.grid_1d);
    consider(AlgorithmKind::PencilPencilPencil, configs.grid_2d);
    consider(AlgorithmKind::Volumetric, configs.grid_3d);
  }

  if (report.rows.empty()) {
    fail(Errc::NoFeasibleConfiguration,
         "no feasible configuration for " + dims.str() + " at the requested rank counts");
  }
  for (const auto& row : report.rows) report.any_ok = report.any_ok || row.ok;
  return report;
}

std::string SweepReport::csv() const {
  std::ostringstream out;
  out << kSweepHeader << '\n';
  for (const auto& row : rows) out << sweep_row_csv(row) << '\n';
  return out.str();
}

}  // namespace gridfft
