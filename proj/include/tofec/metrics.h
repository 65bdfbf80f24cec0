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

#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tofec/engine.h"

namespace tofec {

struct DelaySummary {
  std::size_t count = 0;
  double mean = 0;
  double median = 0;
  double p90 = 0;
  double p99 = 0;
  double max = 0;
  double stddev = 0;      // population
  double throughput = 0;  // completed requests per ms over the measured window
};

// Nearest-rank percentile of a sorted sample: element ceil(p/100 * N).
double nearest_rank(std::span<const double> sorted, double percentile);

// Summary of D_q + D_s over completed post-warmup requests. Throws
// InputError when there are none.
DelaySummary summarize(const SimResult& result);
DelaySummary summarize_delays(std::vector<double> delays, double window_ms);

// Completed post-warmup requests only, in arrival order.
std::vector<double> total_delays(const SimResult& result);

struct Composition {
  std::vector<double> k_fraction;  // index k-1
  std::vector<double> n_fraction;  // index n-1
};

// Fractions of post-warmup arrivals per code dimension and length. Vectors
// are sized to at least k_max and n_max.
Composition composition(const SimResult& result, int k_max = 0, int n_max = 0);

struct SeriesBucket {
  double start_ms = 0;
  std::size_t arrivals = 0;
  std::optional<double> mean_delay;  // completed requests only
  std::optional<double> mean_k;
  std::optional<double> mean_backlog;
};

// Buckets by arrival time over [0, end_ms); warmup is not excluded.
std::vector<SeriesBucket> time_series(const SimResult& result, double bucket_ms);

// Quotes a CSV cell when it holds a comma, quote or newline.
std::string csv_field(const std::string& s);

// Summary CSV shared by `simulate` and `sweep`.
struct SummaryRow {
  std::string scenario;
  std::string strategy;
  double lambda_per_ms = 0;
  bool overloaded = false;
  std::optional<DelaySummary> delays;  // empty when saturated
  std::vector<double> k_fraction;
};

void write_summary_header(std::ostream& out, int k_max);
void write_summary_row(std::ostream& out, const SummaryRow& row, int k_max);

// One row per request: id,class,T_A,T_1,X_k,n,k,D_q,D_s,usage.
void write_requests_csv(std::ostream& out, const SimResult& result);

}  // namespace tofec
