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


// tofec: fit, solve, thresholds, simulate, sweep, synth-trace, encode,
// decode. Exit codes: 0 success, 1 an overloaded run was detected, 2 input
// error.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "tofec/codec.h"
#include "tofec/config.h"
#include "tofec/errors.h"
#include "tofec/experiment.h"
#include "tofec/metrics.h"
#include "tofec/solver.h"
#include "tofec/traces.h"

namespace {

using namespace tofec;

constexpr int kOk = 0;
constexpr int kOverloaded = 1;
constexpr int kInputError = 2;

// Writes to the named file, or stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void provenance(std::ostream& out, const ScenarioConfig& c) {
  out << "# config: " << c.canonical_json << '\n';
}

// The analytic commands take either --config or a single class on the
// command line.
struct ClassArgs {
  std::string config;
  std::string params;
  int threads = 16;
  double file_size_mb = 3.0;
  int k_max = 6;
  double r_max = 2.0;

  void add(CLI::App* app) {
    app->add_option("--config", config, "Scenario config (JSON)");
    app->add_option("--params", params, "Delay params file (key = value)");
    app->add_option("-L,--threads", threads, "Thread count L");
    app->add_option("--file-size-mb", file_size_mb, "File size J in MB");
    app->add_option("--k-max", k_max, "Largest code dimension");
    app->add_option("--r-max", r_max, "Largest redundancy ratio");
  }

  SystemSpec system() const {
    if (!config.empty()) return load_config(config).system;
    if (params.empty()) throw InputError("give --config or --params");
    ClassSpec c;
    c.file_size_mb = file_size_mb;
    c.k_max = k_max;
    c.r_max = r_max;
    c.params = read_params_file(params);
    SystemSpec s{threads, {c}};
    s.validate();
    return s;
  }
};

int cmd_fit(const std::string& trace, const std::string& out, double trim,
            bool no_correction) {
  const auto records = read_trace_file(trace);
  FitOptions opt;
  opt.trim_fraction = trim;
  opt.correct_truncation = !no_correction;
  const auto report = fit_params(records, opt);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  Output o(out);
  o.stream() << "# fitted from " << trace << " (" << records.size() << " records, trim "
             << trim << (no_correction ? ", uncorrected" : "") << ")\n";
  write_params(o.stream(), report.params);
  return kOk;
}

int cmd_solve(const ClassArgs& args, const std::vector<double>& loads,
              const std::vector<double>& queues, const std::string& out) {
  if (loads.empty() == queues.empty()) throw InputError("give exactly one of --load, --queue");
  const SystemSpec sys = args.system();
  Output o(out);
  auto& s = o.stream();
  s << std::setprecision(10) << "mode,value,class_id,lambda_bar,Q,n,k,r\n";
  for (double lb : loads) {
    if (!(lb > 0 && lb < sys.threads)) {
      throw InputError("--load must lie in (0, L); got " + std::to_string(lb));
    }
    const auto opt = optimal_codes_multiclass(sys.classes, lb, sys.threads);
    for (std::size_t i = 0; i < opt.codes.size(); ++i) {
      const auto& c = opt.codes[i];
      s << "load," << lb << ',' << i << ',' << opt.lambda_bar << ',' << opt.queue_length
        << ',' << c.n << ',' << c.k << ',' << c.r << '\n';
    }
  }
  for (double q : queues) {
    if (!(q >= 0)) throw InputError("--queue values must be non-negative");
    for (std::size_t i = 0; i < sys.classes.size(); ++i) {
      const auto c = code_functions_of_queue(sys.classes[i], q, sys.threads);
      s << "queue," << q << ',' << i << ',' << load_from_queue(q, sys.threads) << ',' << q
        << ',' << c.n << ',' << c.k << ',' << c.r << '\n';
    }
  }
  return kOk;
}

int cmd_thresholds(const ClassArgs& args, const std::string& out) {
  const SystemSpec sys = args.system();
  std::vector<ThresholdTable> tables;
  for (const auto& c : sys.classes) {
    tables.push_back(build_thresholds(c, sys.threads));
    if (!tables.back().interleaved()) throw NumericError("threshold tables do not interleave");
  }
  Output o(out);
  write_thresholds_csv(o.stream(), tables);
  return kOk;
}

int cmd_simulate(const std::string& config_path, const std::string& strategy,
                 std::optional<std::uint64_t> seed, const std::string& requests_out,
                 const std::string& summary_out, double bucket_ms,
                 const std::string& series_out) {
  ScenarioConfig c = load_config(config_path);
  if (!strategy.empty()) c.strategy = parse_strategy(strategy);
  if (seed) c.run.seed = *seed;
  const SimResult r = run_scenario(c, c.strategy);
  const double rate = c.arrivals.kind == ArrivalProcess::Kind::poisson
                          ? c.arrivals.rate_per_ms
                          : std::numeric_limits<double>::quiet_NaN();
  if (!requests_out.empty()) {
    Output o(requests_out);
    provenance(o.stream(), c);
    write_requests_csv(o.stream(), r);
  }
  if (!series_out.empty()) {
    Output o(series_out);
    provenance(o.stream(), c);
    o.stream() << "start_ms,arrivals,mean_delay,mean_k,mean_backlog\n";
    for (const auto& b : time_series(r, bucket_ms)) {
      o.stream() << b.start_ms << ',' << b.arrivals << ',';
      if (b.mean_delay) o.stream() << *b.mean_delay;
      o.stream() << ',';
      if (b.mean_k) o.stream() << *b.mean_k;
      o.stream() << ',';
      if (b.mean_backlog) o.stream() << *b.mean_backlog;
      o.stream() << '\n';
    }
  }
  int k_max = 1;
  for (const auto& cls : c.system.classes) k_max = std::max(k_max, cls.k_max);
  Output o(summary_out);
  provenance(o.stream(), c);
  write_summary_header(o.stream(), k_max);
  write_summary_row(o.stream(), summary_row(c, r, rate), k_max);
  if (r.overloaded) {
    std::cerr << "OVERLOADED: backlog exceeded " << c.run.overload_bound << " at t = "
              << r.end_ms << " ms\n";
    return kOverloaded;
  }
  return kOk;
}

int cmd_sweep(const std::string& config_path, std::vector<double> rates,
              const std::vector<double>& fractions, std::vector<std::string> strategies,
              const std::vector<std::string>& envelope, int jobs,
              std::optional<double> requests, const std::string& out) {
  const ScenarioConfig c = load_config(config_path);
  if (rates.empty() == fractions.empty()) {
    throw InputError("give exactly one of --rates, --capacity-fractions");
  }
  const double capacity = full_capacity(c.system.classes, c.system.threads);
  for (double f : fractions) rates.push_back(f * capacity);
  if (strategies.empty()) strategies = {"tofec", "greedy", "static-all"};
  const auto specs = expand_strategies(c.system, strategies);

  // With --requests the horizon scales so each rate sees about that many arrivals.
  std::vector<SummaryRow> rows;
  if (requests) {
    for (double rate : rates) {
      ScenarioConfig ci = c;
      ci.run.horizon_ms = *requests / rate;
      if (c.run.warmup_ms >= 0) ci.run.warmup_ms = c.run.warmup_ms / c.run.horizon_ms * ci.run.horizon_ms;
      auto part = sweep(ci, {rate}, specs, jobs);
      rows.insert(rows.end(), part.begin(), part.end());
    }
  } else {
    rows = sweep(c, rates, specs, jobs);
  }
  for (const auto& m : envelope) {
    if (m.empty()) continue;
    const auto env = best_static_envelope(rows, metric_from_string(m));
    rows.insert(rows.end(), env.begin(), env.end());
  }

  int k_max = 1;
  for (const auto& cls : c.system.classes) k_max = std::max(k_max, cls.k_max);
  Output o(out);
  provenance(o.stream(), c);
  o.stream() << "# full capacity C = " << std::setprecision(10) << capacity << " per ms\n";
  write_summary_header(o.stream(), k_max);
  bool any_overloaded = false;
  for (const auto& r : rows) {
    write_summary_row(o.stream(), r, k_max);
    any_overloaded |= r.overloaded;
  }
  return any_overloaded ? kOverloaded : kOk;
}

int cmd_synth(const std::string& params, const std::vector<double>& sizes,
              std::size_t count, std::uint64_t seed, const std::string& out) {
  const auto p = read_params_file(params);
  const auto records = generate_synthetic_trace(p, sizes, count, seed);
  Output o(out);
  write_trace_csv(o.stream(), records);
  return kOk;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cmd_encode(const std::string& in, const std::string& out, std::uint64_t strip,
               double r) {
  write_coded_file(out, encode(read_bytes(in), strip, r));
  return kOk;
}

int cmd_decode(const std::string& in, const std::string& out, int level,
               const std::vector<std::uint32_t>& chunks) {
  const CodedFile coded = read_coded_file(in);
  std::vector<Piece> pieces;
  for (auto j : chunks) pieces.push_back(read_chunk(coded, level, j));
  const auto bytes = decode_chunks(coded, level, pieces);
  std::ofstream o(out, std::ios::binary);
  if (!o) throw InputError("cannot write " + out);
  o.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive erasure-coded storage access: analysis and simulation"};
  app.require_subcommand(1);
  int code = kOk;

  auto* fit = app.add_subcommand("fit", "Fit delay parameters from a task-delay trace");
  std::string fit_trace, fit_out;
  double fit_trim = 0.1;
  bool fit_raw = false;
  fit->add_option("trace", fit_trace, "Trace CSV")->required();
  fit->add_option("-o,--out", fit_out, "Params file (default stdout)");
  fit->add_option("--trim", fit_trim, "Fraction of largest delays dropped per size");
  fit->add_flag("--no-truncation-correction", fit_raw,
                "Use the trimmed std as the tail mean directly");

  auto* solve = app.add_subcommand("solve", "Continuous optimal (n, k, r) per class");
  ClassArgs solve_args;
  std::vector<double> solve_loads, solve_queues;
  std::string solve_out;
  solve_args.add(solve);
  solve->add_option("--load", solve_loads, "Normalized loads λ̄")->delimiter(',');
  solve->add_option("--queue", solve_queues, "Backlogs Q")->delimiter(',');
  solve->add_option("-o,--out", solve_out, "Output CSV");

  auto* thr = app.add_subcommand("thresholds", "Backlog threshold tables");
  ClassArgs thr_args;
  std::string thr_out;
  thr_args.add(thr);
  thr->add_option("-o,--out", thr_out, "Output CSV");

  auto* sim = app.add_subcommand("simulate", "Run one scenario");
  std::string sim_config, sim_strategy, sim_requests, sim_summary, sim_series;
  std::optional<std::uint64_t> sim_seed;
  double sim_bucket = 10000;
  sim->add_option("config", sim_config, "Scenario config (JSON)")->required();
  sim->add_option("--strategy", sim_strategy, "Override the configured strategy");
  sim->add_option("--seed", sim_seed, "Override the configured seed");
  sim->add_option("--requests-out", sim_requests, "Per-request CSV");
  sim->add_option("--summary-out", sim_summary, "Summary CSV (default stdout)");
  sim->add_option("--series-out", sim_series, "Time series CSV");
  sim->add_option("--bucket-ms", sim_bucket, "Time series bucket width");

  auto* sw = app.add_subcommand("sweep", "Run strategies across arrival rates");
  std::string sw_config, sw_out;
  std::vector<double> sw_rates, sw_fractions;
  std::vector<std::string> sw_strategies, sw_envelope{"mean"};
  int sw_jobs = 1;
  std::optional<double> sw_requests;
  sw->add_option("config", sw_config, "Scenario config (JSON)")->required();
  sw->add_option("--rates", sw_rates, "Arrival rates per ms")->delimiter(',');
  sw->add_option("--capacity-fractions", sw_fractions, "Rates as fractions of C")
      ->delimiter(',');
  sw->add_option("--strategies", sw_strategies,
                 "tofec, greedy, ideal, static(n,k), static-all");
  sw->add_option("--envelope", sw_envelope, "Best-static metrics: mean, median, p90, p99")
      ->delimiter(',');
  sw->add_option("-j,--jobs", sw_jobs, "Concurrent grid points");
  sw->add_option("--requests", sw_requests, "Scale each horizon to this many arrivals");
  sw->add_option("-o,--out", sw_out, "Output CSV");

  auto* syn = app.add_subcommand("synth-trace", "Draw a synthetic task-delay trace");
  std::string syn_params, syn_out;
  std::vector<double> syn_sizes;
  std::size_t syn_count = 10000;
  std::uint64_t syn_seed = 1;
  syn->add_option("--params", syn_params, "Delay params file")->required();
  syn->add_option("--sizes", syn_sizes, "Chunk sizes in MB")->delimiter(',')->required();
  syn->add_option("--count", syn_count, "Records per size");
  syn->add_option("--seed", syn_seed, "Seed");
  syn->add_option("-o,--out", syn_out, "Trace CSV");

  auto* enc = app.add_subcommand("encode", "Encode a file into a coded container");
  std::string enc_in, enc_out;
  std::uint64_t enc_strip = 0;
  double enc_r = 2;
  enc->add_option("input", enc_in, "File to encode")->required();
  enc->add_option("-o,--out", enc_out, "Coded container")->required();
  enc->add_option("--strip-size", enc_strip, "Strip size in bytes")->required();
  enc->add_option("-r,--redundancy", enc_r, "Redundancy ratio N/K");

  auto* dec = app.add_subcommand("decode", "Decode from k chunks of a coded container");
  std::string dec_in, dec_out;
  int dec_level = 1;
  std::vector<std::uint32_t> dec_chunks;
  dec->add_option("input", dec_in, "Coded container")->required();
  dec->add_option("-o,--out", dec_out, "Decoded file")->required();
  dec->add_option("-k,--level", dec_level, "Chunking level k");
  dec->add_option("--chunks", dec_chunks, "1-based chunk indices")->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*fit) code = cmd_fit(fit_trace, fit_out, fit_trim, fit_raw);
    if (*solve) code = cmd_solve(solve_args, solve_loads, solve_queues, solve_out);
    if (*thr) code = cmd_thresholds(thr_args, thr_out);
    if (*sim) {
      code = cmd_simulate(sim_config, sim_strategy, sim_seed, sim_requests, sim_summary,
                          sim_bucket, sim_series);
    }
    if (*sw) {
      code = cmd_sweep(sw_config, sw_rates, sw_fractions, sw_strategies, sw_envelope,
                       sw_jobs, sw_requests, sw_out);
    }
    if (*syn) code = cmd_synth(syn_params, syn_sizes, syn_count, syn_seed, syn_out);
    if (*enc) code = cmd_encode(enc_in, enc_out, enc_strip, enc_r);
    if (*dec) code = cmd_decode(dec_in, dec_out, dec_level, dec_chunks);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return code;
}
