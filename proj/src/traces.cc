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


#include "tofec/traces.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tofec/errors.h"
#include "tofec/random.h"

namespace tofec {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& what, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
  }
}

}  // namespace

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::vector<TraceRecord> records;
  std::string line;
  std::size_t line_no = 0;
  int col_size = -1, col_delay = -1, col_op = -1, col_ts = -1;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split_csv(t);
    if (!have_header) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const int c = static_cast<int>(i);
        if (cells[i] == "chunk_size_mb") col_size = c;
        else if (cells[i] == "delay_ms") col_delay = c;
        else if (cells[i] == "op_type") col_op = c;
        else if (cells[i] == "timestamp") col_ts = c;
      }
      if (col_size < 0 || col_delay < 0) {
        throw InputError("trace header must name chunk_size_mb and delay_ms");
      }
      have_header = true;
      continue;
    }
    const auto need = static_cast<std::size_t>(std::max(col_size, col_delay));
    if (cells.size() <= need) {
      throw InputError("line " + std::to_string(line_no) + ": too few columns");
    }
    TraceRecord r;
    r.chunk_size_mb = parse_number(cells[col_size], "chunk_size_mb", line_no);
    r.delay_ms = parse_number(cells[col_delay], "delay_ms", line_no);
    if (!(r.chunk_size_mb > 0) || !(r.delay_ms > 0) || !std::isfinite(r.delay_ms) ||
        !std::isfinite(r.chunk_size_mb)) {
      throw InputError("line " + std::to_string(line_no) +
                       ": chunk size and delay must be positive");
    }
    if (col_op >= 0 && static_cast<std::size_t>(col_op) < cells.size() &&
        !cells[col_op].empty()) {
      r.op_type = cells[col_op];
    }
    if (col_ts >= 0 && static_cast<std::size_t>(col_ts) < cells.size() &&
        !cells[col_ts].empty()) {
      r.timestamp = parse_number(cells[col_ts], "timestamp", line_no);
    }
    records.push_back(std::move(r));
  }
  if (!have_header) throw InputError("trace has no header row");
  return records;
}

std::vector<TraceRecord> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trace file " + path);
  return read_trace_csv(in);
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> records) {
  out << "chunk_size_mb,delay_ms\n" << std::setprecision(17);
  for (const auto& r : records) out << r.chunk_size_mb << ',' << r.delay_ms << '\n';
}

std::pair<double, double> fit_line(std::span<const double> x,
                                   std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InputError("a line fit needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw InputError("a line fit needs at least two distinct x values");
  const double b = sxy / sxx;
  return {my - b * mx, b};
}

FitReport fit_params(std::span<const TraceRecord> records, const FitOptions& options) {
  if (!(options.trim_fraction >= 0 && options.trim_fraction < 1)) {
    throw InputError("trim fraction must lie in [0, 1)");
  }
  std::map<double, std::vector<double>> groups;
  for (const auto& r : records) {
    if (!(r.chunk_size_mb > 0) || !(r.delay_ms > 0)) {
      throw InputError("trace records need positive chunk size and delay");
    }
    groups[r.chunk_size_mb].push_back(r.delay_ms);
  }
  if (groups.size() < 2) throw InputError("fitting needs at least two distinct chunk sizes");

  FitReport report;
  std::vector<double> xs, means, tails, floors;
  for (auto& [size, delays] : groups) {
    const std::size_t n = delays.size();
    if (n < options.min_per_size) {
      throw InputError("chunk size " + std::to_string(size) + " has " +
                       std::to_string(n) + " records, need " +
                       std::to_string(options.min_per_size));
    }
    // Largest first, record order among ties; the first `drop` go.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return delays[a] > delays[b]; });
    const auto drop = static_cast<std::size_t>(
        std::ceil(options.trim_fraction * static_cast<double>(n) - 1e-9));
    if (drop >= n) throw InputError("trimming would drop every record");
    double sum = 0;
    for (std::size_t i = drop; i < n; ++i) sum += delays[order[i]];
    const double kept = static_cast<double>(n - drop);
    const double mean = sum / kept;
    double ss = 0;
    for (std::size_t i = drop; i < n; ++i) {
      ss += (delays[order[i]] - mean) * (delays[order[i]] - mean);
    }
    const double sd = std::sqrt(ss / kept);
    report.moments.push_back({size, n - drop, mean, sd});

    double mean_factor = 1.0, sd_factor = 1.0;
    const double f = static_cast<double>(drop) / static_cast<double>(n);
    if (options.correct_truncation && f > 0) {
      // Exp(1) conditioned below its (1 - f) quantile x0 = -ln f.
      const double x0 = -std::log(f);
      mean_factor = 1.0 - x0 * f / (1.0 - f);
      const double second = (2.0 - f * (x0 * x0 + 2.0 * x0 + 2.0)) / (1.0 - f);
      sd_factor = std::sqrt(second - mean_factor * mean_factor);
    }
    const double tail = sd / sd_factor;
    xs.push_back(size);
    means.push_back(mean);
    tails.push_back(tail);
    floors.push_back(mean - mean_factor * tail);
  }

  std::tie(report.mean_intercept, report.mean_slope) = fit_line(xs, means);
  std::tie(report.tail_intercept, report.tail_slope) = fit_line(xs, tails);
  const auto [floor_a, floor_b] = fit_line(xs, floors);

  DelayParams p{floor_a, floor_b, report.tail_intercept, report.tail_slope};
  auto clamp = [&](double& v, const char* name) {
    if (v < 0) {
      report.warnings.push_back(std::string("fitted ") + name + " = " +
                                std::to_string(v) + " is negative; clamped to 0");
      v = 0;
    }
  };
  clamp(p.delta_base, "delta_base");
  clamp(p.delta_slope, "delta_slope");
  clamp(p.psi_base, "psi_base");
  clamp(p.psi_slope, "psi_slope");
  report.params = p;
  return report;
}

std::map<double, std::vector<double>> build_pools(std::span<const TraceRecord> records) {
  std::map<double, std::vector<double>> pools;
  for (const auto& r : records) {
    if (!(r.chunk_size_mb > 0) || !(r.delay_ms > 0)) {
      throw InputError("trace records need positive chunk size and delay");
    }
    pools[r.chunk_size_mb].push_back(r.delay_ms);
  }
  if (pools.empty()) throw InputError("no records to pool");
  return pools;
}

EmpiricalSampler build_sampler(std::span<const TraceRecord> records,
                               std::optional<DelayParams> fitted) {
  return EmpiricalSampler(build_pools(records), fitted);
}

std::vector<TraceRecord> generate_synthetic_trace(const DelayParams& params,
                                                  std::span<const double> sizes,
                                                  std::size_t count,
                                                  std::uint64_t seed) {
  if (count < 1) throw InputError("count must be at least 1");
  std::vector<TraceRecord> out;
  out.reserve(count * sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double b = sizes[i];
    if (!(b > 0)) throw InputError("chunk sizes must be positive");
    Rng rng = Rng::substream(seed, "trace", i);
    const double lo = delay_floor(params, b);
    const double tail = tail_mean(params, b);
    for (std::size_t j = 0; j < count; ++j) {
      out.push_back({b, lo + rng.exponential(tail), std::nullopt, std::nullopt});
    }
  }
  return out;
}

DelayParams read_params(std::istream& in) {
  std::map<std::string, double> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InputError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    kv[key] = parse_number(trim(t.substr(eq + 1)), key, line_no);
  }
  auto get = [&](const char* key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw InputError(std::string("params file lacks ") + key);
    return it->second;
  };
  return {get("delta_base_ms"), get("delta_slope_ms_per_mb"), get("psi_base_ms"),
          get("psi_slope_ms_per_mb")};
}

DelayParams read_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open params file " + path);
  return read_params(in);
}

void write_params(std::ostream& out, const DelayParams& p) {
  out << std::setprecision(17) << "delta_base_ms = " << p.delta_base << '\n'
      << "delta_slope_ms_per_mb = " << p.delta_slope << '\n'
      << "psi_base_ms = " << p.psi_base << '\n'
      << "psi_slope_ms_per_mb = " << p.psi_slope << '\n';
}

}  // namespace tofec
