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


// Task-delay traces: CSV ingestion, trimmed least-squares fitting of the
// delay law, empirical pools and a seeded synthetic generator.
//
// Trace CSV: header `chunk_size_mb,delay_ms[,op_type,timestamp]`, lines
// starting with `#` ignored. Params file: one `key = value` per line with
// keys delta_base_ms, delta_slope_ms_per_mb, psi_base_ms, psi_slope_ms_per_mb.
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tofec/engine.h"
#include "tofec/model.h"

namespace tofec {

struct TraceRecord {
  double chunk_size_mb = 0;
  double delay_ms = 0;
  std::optional<std::string> op_type;
  std::optional<double> timestamp;
};

std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_file(const std::string& path);
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> records);

struct FitOptions {
  double trim_fraction = 0.1;
  // The trimmed mean and std of a shifted exponential understate the tail
  // mean by fixed factors that depend only on the trim fraction. When set,
  // both are undone before the lines are fitted; when clear, the std line is
  // taken as the tail line and mean - std as the floor line.
  bool correct_truncation = true;
  std::size_t min_per_size = 20;
};

struct SizeMoments {
  double chunk_size_mb = 0;
  std::size_t count = 0;  // after trimming
  double mean = 0;
  double stddev = 0;  // population
};

struct FitReport {
  DelayParams params;
  std::vector<SizeMoments> moments;
  // Fitted lines: mean = mean_intercept + mean_slope B, tail likewise.
  double mean_intercept = 0;
  double mean_slope = 0;
  double tail_intercept = 0;
  double tail_slope = 0;
  std::vector<std::string> warnings;  // negative components clamped to 0
};

// Ordinary least squares y = a + b x; exact through two points.
std::pair<double, double> fit_line(std::span<const double> x,
                                   std::span<const double> y);

// Per chunk size: drop the ceil(f N) largest delays (ties keep record
// order), take the trimmed moments, then fit straight lines across sizes.
FitReport fit_params(std::span<const TraceRecord> records,
                     const FitOptions& options = {});

// Untrimmed delays grouped by chunk size.
std::map<double, std::vector<double>> build_pools(
    std::span<const TraceRecord> records);

EmpiricalSampler build_sampler(std::span<const TraceRecord> records,
                               std::optional<DelayParams> fitted = std::nullopt);

// `count` draws of floor(B) + Exp(tail(B)) per size, in size order.
std::vector<TraceRecord> generate_synthetic_trace(const DelayParams& params,
                                                  std::span<const double> sizes,
                                                  std::size_t count,
                                                  std::uint64_t seed);

DelayParams read_params(std::istream& in);
DelayParams read_params_file(const std::string& path);
void write_params(std::ostream& out, const DelayParams& params);

}  // namespace tofec
