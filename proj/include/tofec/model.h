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

// Closed-form delay, usage and capacity quantities for erasure-coded
// storage access through L parallel threads.
//
// Units throughout: time in milliseconds, sizes in megabytes, rates in
// requests per millisecond. A task reading or writing a chunk of B MB takes
//
//   D_t(B) = floor(B) + Exp(mean = tail(B)),
//   floor(B) = delta_base + delta_slope * B,
//   tail(B)  = psi_base + psi_slope * B.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tofec {

struct DelayParams {
  double delta_base = 0.0;   // ms
  double delta_slope = 0.0;  // ms/MB
  double psi_base = 0.0;     // ms
  double psi_slope = 0.0;    // ms/MB

  // Throws InputError unless all fields are >= 0 and both the intercept and
  // slope of the mean delay line are positive.
  void validate() const;

  friend bool operator==(const DelayParams&, const DelayParams&) = default;
};

enum class OpType { read, write };

std::string to_string(OpType op);
OpType op_type_from_string(const std::string& s);

struct ClassSpec {
  OpType op = OpType::read;
  double file_size_mb = 1.0;
  double popularity = 1.0;
  int k_max = 1;
  double r_max = 1.0;
  DelayParams params;

  // Largest code length permitted by the caps: floor(r_max * k_max).
  int n_max() const;
  // floor(r_max * k), the per-dimension length cap.
  int n_cap(int k) const;
  void validate() const;
};

struct CodeChoice {
  int n = 1;
  int k = 1;

  double ratio() const { return static_cast<double>(n) / k; }
  void validate() const;

  friend bool operator==(const CodeChoice&, const CodeChoice&) = default;
};

struct SystemSpec {
  int threads = 1;
  std::vector<ClassSpec> classes;

  // Checks L >= 1, every class, and that popularities sum to 1.
  void validate() const;
};

// A constant-rate stretch of a piecewise-Poisson workload.
struct RatePhase {
  double duration_ms = 0;
  double rate_per_ms = 0;
};

enum class ServiceDelayMode { exact_harmonic, log_approx };

// Optional M/G/1-style queueing-delay hook: D_q is scaled by beta, so
// beta = 1 and the disabled hook both give plain M/M/1.
struct QueueModel {
  std::optional<double> mg1_beta;
};

double delay_floor(const DelayParams& params, double chunk_mb);
double tail_mean(const DelayParams& params, double chunk_mb);

// sum_{j=n-k+1}^{n} 1/j
double harmonic_tail_sum(int n, int k);

// ln(n/(n-k)) - harmonic_tail_sum(n, k); requires n > k >= 1.
double harmonic_approx_gap(int n, int k);

// Expected time from the first task start to the k-th completion when all n
// tasks start together. log_approx with n == k returns +infinity.
double expected_service_delay(const ClassSpec& cls, CodeChoice code,
                              ServiceDelayMode mode);

// Expected thread-time consumed by one request, preempted tasks charged up
// to the cancellation instant.
double expected_usage(const ClassSpec& cls, CodeChoice code);

// Real-valued (k, r) variants used by the solver. r > 1 for the delay.
double service_delay_continuous(const ClassSpec& cls, double k, double r);
double usage_continuous(const ClassSpec& cls, double k, double r);

double mean_usage(std::span<const ClassSpec> classes,
                  std::span<const CodeChoice> codes);

double normalized_load(double lambda, std::span<const ClassSpec> classes,
                       std::span<const CodeChoice> codes);

bool is_stable(double lambda_bar, int threads);

// Request-queue waiting time for normalized load lambda_bar and mean usage.
// Throws OverloadError when lambda_bar >= L.
double queueing_delay(double lambda_bar, int threads, double mean_usage,
                      const QueueModel& model = {});

// Q = lambda_bar^2 / (L (L - lambda_bar)). Throws OverloadError when
// lambda_bar >= L.
double mean_queue_length(double lambda_bar, int threads);

// Inverse of mean_queue_length. Q = +inf maps to L.
double load_from_queue(double queue_length, int threads);

double static_capacity(std::span<const ClassSpec> classes,
                       std::span<const CodeChoice> codes, int threads);
double full_capacity(std::span<const ClassSpec> classes, int threads);

}  // namespace tofec
