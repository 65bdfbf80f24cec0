// Copyright 2026 The tofec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Python module `tofec._tofec`: delay model, solver, thresholds, scenario
// runs, trace fitting and the chunk codec.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "tofec/codec.h"
#include "tofec/config.h"
#include "tofec/errors.h"
#include "tofec/experiment.h"
#include "tofec/metrics.h"
#include "tofec/model.h"
#include "tofec/solver.h"
#include "tofec/traces.h"

namespace py = pybind11;
using namespace tofec;

namespace {

std::vector<std::uint8_t> to_vector(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<Piece> to_pieces(const std::vector<std::pair<std::uint32_t, py::bytes>>& items) {
  std::vector<Piece> out;
  for (const auto& [index, data] : items) out.push_back({index, to_vector(data)});
  return out;
}

py::dict summary_dict(const DelaySummary& s) {
  py::dict d;
  d["count"] = s.count;
  d["mean"] = s.mean;
  d["median"] = s.median;
  d["p90"] = s.p90;
  d["p99"] = s.p99;
  d["max"] = s.max;
  d["stddev"] = s.stddev;
  d["throughput"] = s.throughput;
  return d;
}

// Runs a scenario given as JSON text and returns its summary.
py::dict simulate(const std::string& config_json, const std::string& strategy,
                  std::optional<std::uint64_t> seed, const std::string& base_dir) {
  ScenarioConfig cfg = parse_config(config_json, base_dir);
  if (seed) cfg.run.seed = *seed;
  const StrategySpec spec = strategy.empty() ? cfg.strategy : parse_strategy(strategy);
  SimResult result;
  {
    py::gil_scoped_release release;
    result = run_scenario(cfg, spec);
  }
  int k_max = 0;
  for (const auto& c : cfg.system.classes) k_max = std::max(k_max, c.k_max);
  py::dict d;
  d["strategy"] = strategy_label(spec);
  d["overloaded"] = result.overloaded;
  d["arrivals"] = result.arrivals;
  d["completed"] = result.completed;
  d["end_ms"] = result.end_ms;
  d["summary"] = result.overloaded ? py::object(py::none()) : py::object(summary_dict(summarize(result)));
  d["k_fraction"] = composition(result, k_max).k_fraction;
  py::list codes;
  for (const auto& r : result.requests) codes.append(py::make_tuple(r.code.n, r.code.k));
  d["codes"] = codes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tofec, m) {
  m.doc() = "Adaptive erasure-coded storage access: model, solver, simulator and codec";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<OverloadError>(m, "OverloadError", PyExc_RuntimeError);

  py::class_<DelayParams>(m, "DelayParams")
      .def(py::init<>())
      .def(py::init([](double db, double ds, double pb, double ps) {
             return DelayParams{db, ds, pb, ps};
           }),
           py::arg("delta_base"), py::arg("delta_slope"), py::arg("psi_base"), py::arg("psi_slope"))
      .def_readwrite("delta_base", &DelayParams::delta_base)
      .def_readwrite("delta_slope", &DelayParams::delta_slope)
      .def_readwrite("psi_base", &DelayParams::psi_base)
      .def_readwrite("psi_slope", &DelayParams::psi_slope)
      .def("validate", &DelayParams::validate)
      .def("__eq__", [](const DelayParams& a, const DelayParams& b) { return a == b; })
      .def("__repr__", [](const DelayParams& p) {
        return "DelayParams(" + std::to_string(p.delta_base) + ", " + std::to_string(p.delta_slope) +
               ", " + std::to_string(p.psi_base) + ", " + std::to_string(p.psi_slope) + ")";
      });

  py::class_<ClassSpec>(m, "ClassSpec")
      .def(py::init([](double file_size_mb, const DelayParams& params, int k_max, double r_max,
                       double popularity) {
             ClassSpec c;
             c.file_size_mb = file_size_mb;
             c.params = params;
             c.k_max = k_max;
             c.r_max = r_max;
             c.popularity = popularity;
             c.validate();
             return c;
           }),
           py::arg("file_size_mb"), py::arg("params"), py::arg("k_max") = 6, py::arg("r_max") = 2.0,
           py::arg("popularity") = 1.0)
      .def_readwrite("file_size_mb", &ClassSpec::file_size_mb)
      .def_readwrite("params", &ClassSpec::params)
      .def_readwrite("k_max", &ClassSpec::k_max)
      .def_readwrite("r_max", &ClassSpec::r_max)
      .def_readwrite("popularity", &ClassSpec::popularity)
      .def_property_readonly("n_max", &ClassSpec::n_max);

  py::class_<CodeChoice>(m, "CodeChoice")
      .def(py::init([](int n, int k) { return CodeChoice{n, k}; }), py::arg("n"), py::arg("k"))
      .def_readwrite("n", &CodeChoice::n)
      .def_readwrite("k", &CodeChoice::k)
      .def("__eq__", [](const CodeChoice& a, const CodeChoice& b) { return a == b; })
      .def("__repr__", [](const CodeChoice& c) {
        return "CodeChoice(" + std::to_string(c.n) + ", " + std::to_string(c.k) + ")";
      });

  py::class_<ContinuousCode>(m, "ContinuousCode")
      .def_readonly("n", &ContinuousCode::n)
      .def_readonly("k", &ContinuousCode::k)
      .def_readonly("r", &ContinuousCode::r);

  py::class_<ContinuousOptimum>(m, "ContinuousOptimum")
      .def_readonly("codes", &ContinuousOptimum::codes)
      .def_readonly("lambda_bar", &ContinuousOptimum::lambda_bar)
      .def_readonly("queue_length", &ContinuousOptimum::queue_length);

  py::class_<StaticOptimum>(m, "StaticOptimum")
      .def_readonly("codes", &StaticOptimum::codes)
      .def_readonly("objective", &StaticOptimum::objective);

  py::class_<ThresholdTable>(m, "ThresholdTable")
      .def_readonly("queue_n", &ThresholdTable::queue_n)
      .def_readonly("bound_n", &ThresholdTable::bound_n)
      .def_readonly("queue_k", &ThresholdTable::queue_k)
      .def_readonly("bound_k", &ThresholdTable::bound_k)
      .def("select_n", &ThresholdTable::select_n)
      .def("select_k", &ThresholdTable::select_k)
      .def("interleaved", &ThresholdTable::interleaved);

  // Model.
  m.def("harmonic_tail_sum", &harmonic_tail_sum, py::arg("n"), py::arg("k"));
  m.def("harmonic_approx_gap", &harmonic_approx_gap, py::arg("n"), py::arg("k"));
  m.def("expected_service_delay",
        [](const ClassSpec& c, const CodeChoice& code, bool exact) {
          return expected_service_delay(
              c, code, exact ? ServiceDelayMode::exact_harmonic : ServiceDelayMode::log_approx);
        },
        py::arg("cls"), py::arg("code"), py::arg("exact") = true);
  m.def("expected_usage", &expected_usage, py::arg("cls"), py::arg("code"));
  m.def("queueing_delay",
        [](double lambda_bar, int threads, double mean_usage) {
          return queueing_delay(lambda_bar, threads, mean_usage);
        },
        py::arg("lambda_bar"), py::arg("threads"), py::arg("mean_usage"));
  m.def("mean_queue_length", &mean_queue_length, py::arg("lambda_bar"), py::arg("threads"));
  m.def("load_from_queue", &load_from_queue, py::arg("queue_length"), py::arg("threads"));
  m.def("full_capacity",
        [](const std::vector<ClassSpec>& cs, int threads) { return full_capacity(cs, threads); },
        py::arg("classes"), py::arg("threads"));

  // Solver.
  m.def("solve_class_at_load", &solve_class_at_load, py::arg("cls"), py::arg("lambda_bar"),
        py::arg("threads"));
  m.def("optimal_codes_multiclass",
        [](const std::vector<ClassSpec>& cs, double lambda_bar, int threads) {
          return optimal_codes_multiclass(cs, lambda_bar, threads);
        },
        py::arg("classes"), py::arg("lambda_bar"), py::arg("threads"));
  m.def("optimal_codes_at_rate",
        [](const std::vector<ClassSpec>& cs, double lambda, int threads) {
          return optimal_codes_at_rate(cs, lambda, threads);
        },
        py::arg("classes"), py::arg("lambda"), py::arg("threads"));
  m.def("code_functions_of_queue", &code_functions_of_queue, py::arg("cls"),
        py::arg("queue_length"), py::arg("threads"));
  m.def("build_thresholds", &build_thresholds, py::arg("cls"), py::arg("threads"));
  m.def("admissible_codes", &admissible_codes, py::arg("cls"));
  m.def("brute_force_best_static",
        [](const std::vector<ClassSpec>& cs, double lambda, int threads) {
          return brute_force_best_static(cs, lambda, threads);
        },
        py::arg("classes"), py::arg("lambda"), py::arg("threads"));

  // Scenarios.
  m.def("simulate", &simulate, py::arg("config_json"), py::arg("strategy") = "",
        py::arg("seed") = py::none(), py::arg("base_dir") = ".",
        "Runs a scenario given as JSON text. Returns a dict with the delay summary "
        "(None when overloaded), k composition and the per-request codes.");

  // Traces.
  m.def("generate_synthetic_trace",
        [](const DelayParams& p, const std::vector<double>& sizes, std::size_t count,
           std::uint64_t seed) {
          py::list out;
          for (const auto& r : generate_synthetic_trace(p, sizes, count, seed)) {
            out.append(py::make_tuple(r.chunk_size_mb, r.delay_ms));
          }
          return out;
        },
        py::arg("params"), py::arg("sizes"), py::arg("count"), py::arg("seed"),
        "List of (chunk_size_mb, delay_ms) pairs.");
  m.def("fit_params",
        [](const std::vector<std::pair<double, double>>& samples, double trim_fraction,
           bool correct_truncation) {
          std::vector<TraceRecord> recs;
          recs.reserve(samples.size());
          for (const auto& [b, d] : samples) recs.push_back({b, d, std::nullopt, std::nullopt});
          FitOptions o;
          o.trim_fraction = trim_fraction;
          o.correct_truncation = correct_truncation;
          const FitReport rep = fit_params(recs, o);
          return py::make_tuple(rep.params, rep.warnings);
        },
        py::arg("samples"), py::arg("trim_fraction") = 0.1, py::arg("correct_truncation") = true,
        "Fits delay parameters to (chunk_size_mb, delay_ms) pairs; returns (params, warnings).");
  m.def("fit_trace_file",
        [](const std::string& path) { return fit_params(read_trace_file(path)).params; },
        py::arg("path"));

  // Codec.
  py::class_<CodedFile>(m, "CodedFile")
      .def_readonly("K", &CodedFile::K)
      .def_readonly("N", &CodedFile::N)
      .def_readonly("strip_size", &CodedFile::strip_size)
      .def_readonly("pad", &CodedFile::pad)
      .def_property_readonly("original_size", &CodedFile::original_size)
      .def("strip",
           [](const CodedFile& c, std::uint32_t s) {
             const auto sp = c.strip(s);
             return to_bytes({sp.begin(), sp.end()});
           })
      .def("chunk",
           [](const CodedFile& c, int k, std::uint32_t j) { return to_bytes(read_chunk(c, k, j).bytes); })
      .def("chunk_count", [](const CodedFile& c, int k) { return chunk_count(c, k); })
      .def("serialize", [](const CodedFile& c) { return to_bytes(serialize(c)); })
      .def_static("deserialize", [](const py::bytes& b) { return deserialize(to_vector(b)); });

  m.def("encode",
        [](const py::bytes& data, std::uint64_t strip_size, double redundancy) {
          return encode(to_vector(data), strip_size, redundancy);
        },
        py::arg("data"), py::arg("strip_size"), py::arg("redundancy"));
  m.def("decode_strips",
        [](const CodedFile& c, const std::vector<std::pair<std::uint32_t, py::bytes>>& strips) {
          return to_bytes(decode_strips(c, to_pieces(strips)));
        },
        py::arg("coded"), py::arg("strips"), "strips: list of (1-based index, bytes).");
  m.def("decode_chunks",
        [](const CodedFile& c, int k, const std::vector<std::pair<std::uint32_t, py::bytes>>& chunks) {
          return to_bytes(decode_chunks(c, k, to_pieces(chunks)));
        },
        py::arg("coded"), py::arg("k"), py::arg("chunks"), "chunks: list of (1-based index, bytes).");
}
