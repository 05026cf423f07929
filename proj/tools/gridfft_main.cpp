#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridfft/reports.hpp"

namespace {

using gridfft::RunConfig;
using gridfft::Shape;

Shape to_shape(const std::vector<std::int64_t>& values, const char* what) {
  if (values.empty()) gridfft::fail(gridfft::Errc::InvalidParams, std::string(what) + " is empty");
  return Shape(values);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) gridfft::fail(gridfft::Errc::InvalidParams, "cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) gridfft::fail(gridfft::Errc::InvalidParams, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CommonFlags {
  std::vector<std::int64_t> dims;
  std::string alg;
  std::vector<std::int64_t> grid;
  std::string output;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double beta = 0.0;
  int ports = 0;
  int repetitions = 0;
  bool force = false;
  bool serial = false;
  std::string config_path;
};

void add_model_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--alpha", flags.alpha, "startup cost per collective step, seconds");
  cmd->add_option("--beta", flags.beta, "inverse bandwidth, seconds per complex element");
  cmd->add_option("--ports", flags.ports, "ports per node for the all-to-all bounds");
}

bool given(const CLI::App* cmd, const std::string& name) {
  const CLI::Option* opt = cmd->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

// Start from defaults, overlay the JSON config when given, then overlay every
// flag the user actually typed.
RunConfig resolve_config(const CLI::App* cmd, const CommonFlags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) config = gridfft::run_config_from_json(read_file(flags.config_path));
  if (given(cmd, "--dims")) config.dims = to_shape(flags.dims, "--dims");
  if (given(cmd, "--alg")) config.alg = gridfft::algorithm_from_name(flags.alg);
  if (given(cmd, "--grid")) config.grid = to_shape(flags.grid, "--grid");
  if (given(cmd, "--output")) config.output = gridfft::output_mode_from_name(flags.output);
  if (given(cmd, "--seed")) config.seed = flags.seed;
  if (given(cmd, "--alpha")) config.params.alpha = flags.alpha;
  if (given(cmd, "--beta")) config.params.beta = flags.beta;
  if (given(cmd, "--ports")) config.params.ports = flags.ports;
  if (given(cmd, "--repetitions")) config.repetitions = flags.repetitions;
  if (flags.force) config.force = true;
  if (flags.serial) config.schedule = gridfft::ScheduleMode::Serial;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parallel multi-dimensional DFT simulator and communication cost model"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string csv_path;
  std::string trace_path;
  std::vector<std::int64_t> rank_counts;
  std::int64_t advise_p = 0;

  auto* verify = app.add_subcommand("verify", "run one algorithm and check it against the reference transform");
  verify->add_option("--dims", flags.dims, "problem extents, e.g. 8,8,8 or 256")->delimiter(',');
  verify->add_option("--alg", flags.alg, "sixstep|cyclic|slab|pencil|volumetric");
  verify->add_option("--grid", flags.grid, "processor grid extents, e.g. 2,2,2")->delimiter(',');
  verify->add_option("--output", flags.output, "natural|shuffled");
  verify->add_option("--seed", flags.seed, "input generator seed");
  verify->add_option("--repetitions", flags.repetitions, "simulator timing repetitions");
  verify->add_flag("--force", flags.force, "ignore the desk-scale gate");
  verify->add_flag("--serial", flags.serial, "serial rank scheduling (debug; bit-identical results)");
  verify->add_option("--config", flags.config_path, "JSON config mirroring the run options");
  verify->add_option("--trace", trace_path, "write the collective event log as JSON lines");
  add_model_flags(verify, flags);

  auto* advise = app.add_subcommand("advise", "rank feasible algorithm/grid pairs by modeled cost");
  advise->add_option("--dims", flags.dims, "problem extents, e.g. 64,64,64")->delimiter(',');
  advise->add_option("--p", advise_p, "rank count (a grid-table entry)")->required();
  advise->add_option("--csv", csv_path, "also write the ranking as CSV");
  add_model_flags(advise, flags);

  auto* sweep = app.add_subcommand("sweep", "model every grid-table configuration; simulate the desk-scale ones");
  sweep->add_option("--dims", flags.dims, "problem extents, e.g. 16,16,16")->delimiter(',');
  sweep->add_option("--p", rank_counts, "rank counts, e.g. 2,4,8")->delimiter(',')->required();
  sweep->add_option("--output", flags.output, "natural|shuffled for the simulated runs");
  sweep->add_option("--seed", flags.seed, "input generator seed");
  sweep->add_flag("--force", flags.force, "simulate above the desk-scale gate");
  sweep->add_flag("--serial", flags.serial, "serial rank scheduling");
  sweep->add_option("--config", flags.config_path, "JSON config mirroring the run options");
  sweep->add_option("--csv", csv_path, "write the CSV here instead of stdout");
  sweep->add_option("--trace", trace_path, "write the collective event logs as JSON lines");
  add_model_flags(sweep, flags);

  auto* grids = app.add_subcommand("grids", "print the power-of-two grid table");
  grids->add_option("--csv", csv_path, "write the table as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      const RunConfig config = resolve_config(verify, flags);
      const gridfft::VerifyReport report = gridfft::cmd_verify(config);
      std::cout << report.text();
      if (!trace_path.empty()) write_file(trace_path, report.trace);
      return report.pass ? 0 : 1;
    }
    if (advise->parsed()) {
      const RunConfig config = resolve_config(advise, flags);
      const gridfft::AdviseReport report =
          gridfft::cmd_advise(config.dims, advise_p, config.params);
      std::cout << report.text();
      if (!csv_path.empty()) write_file(csv_path, report.csv());
      return 0;
    }
    if (sweep->parsed()) {
      const RunConfig config = resolve_config(sweep, flags);
      const gridfft::SweepReport report = gridfft::cmd_sweep(config.dims, rank_counts, config);
      if (csv_path.empty()) {
        std::cout << report.csv();
      } else {
        write_file(csv_path, report.csv());
      }
      for (const auto& row : report.rows) {
        if (!row.ok) {
          std::cerr << "row p=" << row.ranks << " grid=" << row.grid.str() << " "
                    << algorithm_name(row.alg) << " failed: " << row.note << '\n';
        }
      }
      if (!trace_path.empty()) write_file(trace_path, report.trace);
      return report.any_ok ? 0 : 2;
    }
    if (grids->parsed()) {
      if (csv_path.empty()) {
        std::cout << gridfft::grid_configs_csv();
      } else {
        write_file(csv_path, gridfft::grid_configs_csv());
      }
      return 0;
    }
  } catch (const gridfft::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
