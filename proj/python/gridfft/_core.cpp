#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gridfft/reports.hpp"

namespace py = pybind11;
using namespace gridfft;

namespace {

using NpArray = py::array_t<std::complex<double>, py::array::f_style | py::array::forcecast>;

Tensor tensor_from(const NpArray& arr) {
  if (arr.ndim() < 1) fail(Errc::ShapeMismatch, "expected an array with at least one dimension");
  std::vector<std::int64_t> extents(static_cast<std::size_t>(arr.ndim()));
  for (py::ssize_t d = 0; d < arr.ndim(); ++d) {
    extents[static_cast<std::size_t>(d)] = arr.shape(d);
  }
  std::vector<cplx> data(arr.data(), arr.data() + arr.size());
  return Tensor{Shape(std::move(extents)), std::move(data)};
}

py::array tensor_to(const Tensor& t) {
  std::vector<py::ssize_t> shape;
  for (auto e : t.shape().extents()) shape.push_back(static_cast<py::ssize_t>(e));
  py::array_t<std::complex<double>, py::array::f_style> out(shape);
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

Shape shape_from(const std::vector<std::int64_t>& extents) { return Shape(extents); }

py::dict estimate_to_dict(const CostEstimate& est) {
  py::dict out;
  out["latency"] = est.latency;
  out["bandwidth"] = est.bandwidth;
  out["total"] = est.total;
  py::list stages;
  for (const auto& s : est.stages) {
    py::dict stage;
    stage["label"] = s.label;
    stage["ranks"] = s.ranks;
    stage["elements"] = s.elements;
    stage["latency"] = s.latency;
    stage["bandwidth"] = s.bandwidth;
    stage["total"] = s.total;
    stage["variant"] = s.variant;
    stages.append(stage);
  }
  out["stages"] = stages;
  return out;
}

CostParams params_from(double alpha, double beta, int ports) { return CostParams{alpha, beta, ports}; }

SpawnOptions spawn_options(bool serial) {
  SpawnOptions opts;
  opts.mode = serial ? ScheduleMode::Serial : ScheduleMode::Concurrent;
  return opts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parallel multi-dimensional DFT algorithms over a simulated processor grid";

  py::register_exception<Error>(m, "Error");

  // sequential kernels -------------------------------------------------------
  m.def("dft_naive", [](const NpArray& x) {
    const Tensor t = tensor_from(x);
    return tensor_to(Tensor{t.shape(), dft_naive(t.data())});
  });
  m.def("idft_naive", [](const NpArray& x) {
    const Tensor t = tensor_from(x);
    return tensor_to(Tensor{t.shape(), idft_naive(t.data())});
  });
  m.def("ct_step", [](const NpArray& x, std::int64_t rows, std::int64_t cols) {
    const Tensor t = tensor_from(x);
    return tensor_to(Tensor{t.shape(), ct_step(t.data(), rows, cols)});
  });
  m.def("fft", [](const NpArray& x, const std::vector<std::int64_t>& radices) {
    const Tensor t = tensor_from(x);
    return tensor_to(Tensor{t.shape(), gridfft::fft(t.data(), radices)});
  });
  m.def("twiddle", [](std::int64_t rows, std::int64_t cols) { return tensor_to(twiddle(rows, cols)); });
  m.def("batch_dft_mode", [](const NpArray& t, int mode) {
    return tensor_to(batch_dft_mode(tensor_from(t), mode));
  });
  m.def("reference_dft_nd", [](const NpArray& t) { return tensor_to(reference_dft_nd(tensor_from(t))); });

  // distribution algebra -----------------------------------------------------
  m.def("parse_dist", [](const std::string& text) { return parse_dist(text).str(); },
        "parse a bracket distribution and return its canonical form");
  m.def("local_shape",
        [](const std::vector<std::int64_t>& global, const std::string& dist,
           const std::vector<std::int64_t>& grid) {
          return local_shape(shape_from(global), parse_dist(dist), Grid{shape_from(grid)}).extents();
        });
  m.def("owner_of",
        [](const std::vector<std::int64_t>& index, const std::string& dist,
           const std::vector<std::int64_t>& grid, const std::vector<std::int64_t>& global) {
          const Placement p =
              owner_of(index, parse_dist(dist), Grid{shape_from(grid)}, shape_from(global));
          return py::make_tuple(p.rank, p.local_index);
        });

  // parallel algorithms ------------------------------------------------------
  m.def(
      "run_dft",
      [](const NpArray& input, const std::string& alg, const std::vector<std::int64_t>& grid,
         const std::string& output, bool serial) {
        const Tensor t = tensor_from(input);
        const DftProblem problem{t.shape(), {}, output_mode_from_name(output)};
        const DftRun run = run_parallel_dft(problem, algorithm_from_name(alg),
                                            Grid{shape_from(grid)}, t, spawn_options(serial));
        py::dict out;
        out["output"] = tensor_to(run.gathered);
        out["collectives"] = count_collectives(run.run.logs[0]);
        out["stage_dists"] = run.run.stage_dists;
        out["output_dist"] = run.run.output.dist().str();
        out["trace"] = trace_jsonl(run.run.logs);
        return out;
      },
      py::arg("input"), py::arg("alg"), py::arg("grid"), py::arg("output") = "natural",
      py::arg("serial") = false,
      "run one distributed transform and gather the natural-order result");
  m.def("expected_collectives",
        [](const std::string& alg, const std::vector<std::int64_t>& grid, const std::string& output) {
          return expected_collectives(algorithm_from_name(alg), Grid{shape_from(grid)},
                                      output_mode_from_name(output));
        });

  // cost model ---------------------------------------------------------------
  m.def("cost_mst", [](std::int64_t ranks, std::int64_t elements, double alpha, double beta,
                       int ports) { return estimate_to_dict(cost_mst(ranks, elements, params_from(alpha, beta, ports))); },
        py::arg("ranks"), py::arg("elements"), py::arg("alpha") = 1e-5, py::arg("beta") = 1e-9,
        py::arg("ports") = 1);
  m.def("cost_bkt", [](std::int64_t ranks, std::int64_t elements, double alpha, double beta,
                       int ports) { return estimate_to_dict(cost_bkt(ranks, elements, params_from(alpha, beta, ports))); },
        py::arg("ranks"), py::arg("elements"), py::arg("alpha") = 1e-5, py::arg("beta") = 1e-9,
        py::arg("ports") = 1);
  m.def("latency_threshold",
        [](const std::string& variant, std::int64_t elements, double alpha, double beta, int ports) {
          if (variant != "mst" && variant != "bkt") {
            fail(Errc::InvalidParams, "variant must be mst or bkt");
          }
          return latency_threshold(variant == "mst" ? AllToAllVariant::Mst : AllToAllVariant::Bkt,
                                   elements, params_from(alpha, beta, ports));
        },
        py::arg("variant"), py::arg("elements"), py::arg("alpha") = 1e-5, py::arg("beta") = 1e-9,
        py::arg("ports") = 1);
  m.def("max_procs", [](const std::string& alg, const std::vector<std::int64_t>& dims) {
    return max_procs(algorithm_from_name(alg), shape_from(dims));
  });
  m.def("estimate_algorithm",
        [](const std::string& alg, const std::vector<std::int64_t>& dims,
           const std::vector<std::int64_t>& grid, double alpha, double beta, int ports) {
          return estimate_to_dict(estimate_algorithm(algorithm_from_name(alg), shape_from(dims),
                                                     shape_from(grid), params_from(alpha, beta, ports)));
        },
        py::arg("alg"), py::arg("dims"), py::arg("grid"), py::arg("alpha") = 1e-5,
        py::arg("beta") = 1e-9, py::arg("ports") = 1);
  m.def("grid_configs", [](std::int64_t ranks) {
    const GridConfigs row = grid_configs(ranks);
    py::dict out;
    auto put = [&out](const char* key, const std::optional<Shape>& shape) {
      if (shape) {
        py::tuple t(shape->order());
        for (int i = 0; i < shape->order(); ++i) t[static_cast<std::size_t>(i)] = (*shape)[i];
        out[key] = t;
      } else {
        out[key] = py::none();
      }
    };
    put("1d", row.grid_1d);
    put("2d", row.grid_2d);
    put("3d", row.grid_3d);
    return out;
  });
  m.def("grid_configs_csv", [] { return grid_configs_csv(); });
  m.def("advise",
        [](const std::vector<std::int64_t>& dims, std::int64_t ranks, double alpha, double beta,
           int ports) {
          py::list out;
          for (const auto& row : advise(shape_from(dims), ranks, params_from(alpha, beta, ports))) {
            py::dict entry;
            entry["algorithm"] = std::string(algorithm_name(row.alg));
            entry["grid"] = row.grid.extents();
            entry["cost"] = estimate_to_dict(row.cost);
            out.append(entry);
          }
          return out;
        },
        py::arg("dims"), py::arg("ranks"), py::arg("alpha") = 1e-5, py::arg("beta") = 1e-9,
        py::arg("ports") = 1);

  // verification -------------------------------------------------------------
  m.def(
      "verify",
      [](const std::vector<std::int64_t>& dims, const std::string& alg,
         const std::vector<std::int64_t>& grid, const std::string& output, std::uint64_t seed,
         bool serial) {
        RunConfig config;
        config.dims = shape_from(dims);
        config.alg = algorithm_from_name(alg);
        config.grid = shape_from(grid);
        config.output = output_mode_from_name(output);
        config.seed = seed;
        config.repetitions = 1;
        config.schedule = serial ? ScheduleMode::Serial : ScheduleMode::Concurrent;
        const VerifyReport report = cmd_verify(config);
        py::dict out;
        out["pass"] = report.pass;
        out["rel_err"] = report.rel_err;
        out["collectives"] = report.collectives;
        out["expected"] = report.expected;
        out["stage_dists"] = report.stage_dists;
        out["text"] = report.text();
        return out;
      },
      py::arg("dims"), py::arg("alg"), py::arg("grid"), py::arg("output") = "natural",
      py::arg("seed") = 12345, py::arg("serial") = false);
}
