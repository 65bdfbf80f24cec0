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

#include "tofec/metrics.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tofec/errors.h"

namespace tofec {

double nearest_rank(std::span<const double> sorted, double percentile) {
  if (sorted.empty()) throw InputError("percentile of an empty sample");
  if (!(percentile > 0 && percentile <= 100)) {
    throw InputError("percentile must lie in (0, 100]");
  }
  const double n = static_cast<double>(sorted.size());
  // The small slack keeps e.g. 90% of 100 at rank 90 despite rounding.
  auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<double> total_delays(const SimResult& result) {
  std::vector<double> out;
  for (const auto& r : result.requests) {
    if (r.post_warmup && r.completed()) out.push_back(r.total_delay());
  }
  return out;
}

DelaySummary summarize_delays(std::vector<double> delays, double window_ms) {
  if (delays.empty()) throw InputError("no completed post-warmup requests to summarize");
  std::sort(delays.begin(), delays.end());
  DelaySummary s;
  s.count = delays.size();
  // Sorted summation keeps the result independent of input order.
  double sum = 0;
  for (double d : delays) sum += d;
  s.mean = sum / s.count;
  double sq = 0;
  for (double d : delays) sq += (d - s.mean) * (d - s.mean);
  s.stddev = std::sqrt(sq / s.count);
  s.median = nearest_rank(delays, 50);
  s.p90 = nearest_rank(delays, 90);
  s.p99 = nearest_rank(delays, 99);
  s.max = delays.back();
  s.throughput = window_ms > 0 ? s.count / window_ms : 0;
  return s;
}

DelaySummary summarize(const SimResult& result) {
  return summarize_delays(total_delays(result), result.end_ms - result.warmup_ms);
}

Composition composition(const SimResult& result, int k_max, int n_max) {
  Composition c;
  c.k_fraction.assign(std::max(k_max, 1), 0.0);
  c.n_fraction.assign(std::max(n_max, 1), 0.0);
  std::size_t total = 0;
  for (const auto& r : result.requests) {
    if (!r.post_warmup) continue;
    if (r.code.k > static_cast<int>(c.k_fraction.size())) c.k_fraction.resize(r.code.k, 0.0);
    if (r.code.n > static_cast<int>(c.n_fraction.size())) c.n_fraction.resize(r.code.n, 0.0);
    c.k_fraction[r.code.k - 1] += 1;
    c.n_fraction[r.code.n - 1] += 1;
    ++total;
  }
  if (total > 0) {
    for (double& f : c.k_fraction) f /= total;
    for (double& f : c.n_fraction) f /= total;
  }
  return c;
}

std::vector<SeriesBucket> time_series(const SimResult& result, double bucket_ms) {
  if (!(bucket_ms > 0)) throw InputError("bucket width must be positive");
  const auto count = static_cast<std::size_t>(std::ceil(result.end_ms / bucket_ms));
  std::vector<SeriesBucket> out(count);
  std::vector<double> delay_sum(count, 0), k_sum(count, 0), q_sum(count, 0);
  std::vector<std::size_t> done(count, 0);
  for (std::size_t i = 0; i < count; ++i) out[i].start_ms = i * bucket_ms;
  for (const auto& r : result.requests) {
    const auto b = static_cast<std::size_t>(r.arrival_ms / bucket_ms);
    if (b >= count) continue;
    ++out[b].arrivals;
    k_sum[b] += r.code.k;
    q_sum[b] += r.backlog_at_arrival;
    if (r.completed()) {
      delay_sum[b] += r.total_delay();
      ++done[b];
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (out[i].arrivals > 0) {
      out[i].mean_k = k_sum[i] / out[i].arrivals;
      out[i].mean_backlog = q_sum[i] / out[i].arrivals;
    }
    if (done[i] > 0) out[i].mean_delay = delay_sum[i] / done[i];
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_summary_header(std::ostream& out, int k_max) {
  out << "scenario,strategy,lambda_per_ms,overloaded,count,mean,median,p90,p99,std,"
         "throughput_per_ms";
  for (int k = 1; k <= k_max; ++k) out << ",k" << k;
  out << '\n';
}

void write_summary_row(std::ostream& out, const SummaryRow& row, int k_max) {
  const auto old_precision = out.precision(10);
  out << csv_field(row.scenario) << ',' << csv_field(row.strategy) << ',' << row.lambda_per_ms << ','
      << (row.overloaded ? 1 : 0) << ',';
  if (row.delays && !row.overloaded) {
    const auto& d = *row.delays;
    out << d.count << ',' << d.mean << ',' << d.median << ',' << d.p90 << ','
        << d.p99 << ',' << d.stddev << ',' << d.throughput;
  } else {
    out << ",,,,,,";
  }
  for (int k = 1; k <= k_max; ++k) {
    out << ',';
    if (k - 1 < static_cast<int>(row.k_fraction.size())) out << row.k_fraction[k - 1];
  }
  out << '\n';
  out.precision(old_precision);
}

void write_requests_csv(std::ostream& out, const SimResult& result) {
  const auto old_precision = out.precision(12);
  out << "id,class,T_A,T_1,X_k,n,k,D_q,D_s,usage\n";
  for (const auto& r : result.requests) {
    out << r.id << ',' << r.class_id << ',' << r.arrival_ms << ',';
    if (r.dispatch_ms >= 0) out << r.dispatch_ms;
    out << ',';
    if (r.completed()) out << r.completion_ms;
    out << ',' << r.code.n << ',' << r.code.k << ',';
    if (r.dispatch_ms >= 0) out << r.queueing_delay();
    out << ',';
    if (r.completed()) out << r.service_delay();
    out << ',' << r.usage << '\n';
  }
  out.precision(old_precision);
}

}  // namespace tofec
