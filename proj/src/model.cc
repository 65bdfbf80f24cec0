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

#include "tofec/model.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "tofec/errors.h"

namespace tofec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_chunk(double chunk_mb) {
  if (!(chunk_mb > 0.0)) {
    throw InputError("chunk size must be positive");
  }
}

void require_matching(std::span<const ClassSpec> classes,
                      std::span<const CodeChoice> codes) {
  if (classes.size() != codes.size() || classes.empty()) {
    throw InputError("class and code lists must be non-empty and of equal length");
  }
}

}  // namespace

void DelayParams::validate() const {
  if (delta_base < 0 || delta_slope < 0 || psi_base < 0 || psi_slope < 0 ||
      !std::isfinite(delta_base + delta_slope + psi_base + psi_slope)) {
    throw InputError("delay parameters must be finite and non-negative");
  }
  if (!(delta_base + psi_base > 0) || !(delta_slope + psi_slope > 0)) {
    throw InputError("degenerate delay law: intercept and slope must be positive");
  }
}

std::string to_string(OpType op) { return op == OpType::read ? "read" : "write"; }

OpType op_type_from_string(const std::string& s) {
  if (s == "read") return OpType::read;
  if (s == "write") return OpType::write;
  throw InputError("unknown op type '" + s + "'");
}

int ClassSpec::n_cap(int k) const {
  // The epsilon absorbs representation error in products like 2.0 * 6.
  return static_cast<int>(std::floor(r_max * k + 1e-9));
}

int ClassSpec::n_max() const { return n_cap(k_max); }

void ClassSpec::validate() const {
  if (!(file_size_mb > 0)) throw InputError("file size must be positive");
  if (!(popularity >= 0 && popularity <= 1)) {
    throw InputError("popularity must lie in [0, 1]");
  }
  if (k_max < 1) throw InputError("k_max must be >= 1");
  if (!(r_max >= 1)) throw InputError("r_max must be >= 1");
  params.validate();
}

void CodeChoice::validate() const {
  if (k < 1 || n < k) {
    throw InputError("code must satisfy n >= k >= 1 (got (" +
                     std::to_string(n) + "," + std::to_string(k) + "))");
  }
}

void SystemSpec::validate() const {
  if (threads < 1) throw InputError("thread count L must be >= 1");
  if (classes.empty()) throw InputError("at least one class is required");
  double total = 0;
  for (const auto& c : classes) {
    c.validate();
    total += c.popularity;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InputError("class popularities must sum to 1");
  }
}

double delay_floor(const DelayParams& params, double chunk_mb) {
  require_chunk(chunk_mb);
  return params.delta_base + params.delta_slope * chunk_mb;
}

double tail_mean(const DelayParams& params, double chunk_mb) {
  require_chunk(chunk_mb);
  return params.psi_base + params.psi_slope * chunk_mb;
}

double harmonic_tail_sum(int n, int k) {
  CodeChoice{n, k}.validate();
  double sum = 0;
  // Smallest terms first.
  for (int j = n; j >= n - k + 1; --j) sum += 1.0 / j;
  return sum;
}

double harmonic_approx_gap(int n, int k) {
  if (k < 1 || n <= k) throw InputError("approximation gap requires n > k >= 1");
  return std::log(static_cast<double>(n) / (n - k)) - harmonic_tail_sum(n, k);
}

double expected_service_delay(const ClassSpec& cls, CodeChoice code,
                              ServiceDelayMode mode) {
  code.validate();
  const double chunk = cls.file_size_mb / code.k;
  const double floor = delay_floor(cls.params, chunk);
  const double tail = tail_mean(cls.params, chunk);
  if (mode == ServiceDelayMode::exact_harmonic) {
    return floor + tail * harmonic_tail_sum(code.n, code.k);
  }
  if (code.n == code.k) return kInf;
  return floor + tail * std::log(static_cast<double>(code.n) / (code.n - code.k));
}

double expected_usage(const ClassSpec& cls, CodeChoice code) {
  code.validate();
  const double chunk = cls.file_size_mb / code.k;
  return code.n * delay_floor(cls.params, chunk) +
         code.k * tail_mean(cls.params, chunk);
}

double service_delay_continuous(const ClassSpec& cls, double k, double r) {
  if (!(k > 0) || !(r > 1)) return kInf;
  const auto& p = cls.params;
  const double J = cls.file_size_mb;
  return p.delta_base + p.delta_slope * J / k +
         (p.psi_base + p.psi_slope * J / k) * std::log(r / (r - 1));
}

double usage_continuous(const ClassSpec& cls, double k, double r) {
  const auto& p = cls.params;
  const double J = cls.file_size_mb;
  return p.delta_base * k * r + p.delta_slope * J * r + p.psi_base * k +
         p.psi_slope * J;
}

double mean_usage(std::span<const ClassSpec> classes,
                  std::span<const CodeChoice> codes) {
  require_matching(classes, codes);
  double total = 0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    total += classes[i].popularity * expected_usage(classes[i], codes[i]);
  }
  return total;
}

double normalized_load(double lambda, std::span<const ClassSpec> classes,
                       std::span<const CodeChoice> codes) {
  if (!(lambda >= 0)) throw InputError("arrival rate must be non-negative");
  return lambda * mean_usage(classes, codes);
}

bool is_stable(double lambda_bar, int threads) {
  return lambda_bar >= 0 && lambda_bar < threads;
}

double queueing_delay(double lambda_bar, int threads, double mean_usage,
                      const QueueModel& model) {
  if (threads < 1) throw InputError("thread count L must be >= 1");
  if (lambda_bar < 0) throw InputError("normalized load must be non-negative");
  if (!is_stable(lambda_bar, threads)) {
    throw OverloadError("normalized load " + std::to_string(lambda_bar) +
                        " >= L = " + std::to_string(threads));
  }
  const double L = threads;
  const double base = lambda_bar * mean_usage / (L * (L - lambda_bar));
  if (model.mg1_beta) return *model.mg1_beta * base;
  return base;
}

double mean_queue_length(double lambda_bar, int threads) {
  if (threads < 1) throw InputError("thread count L must be >= 1");
  if (lambda_bar < 0) throw InputError("normalized load must be non-negative");
  if (!is_stable(lambda_bar, threads)) {
    throw OverloadError("normalized load " + std::to_string(lambda_bar) +
                        " >= L = " + std::to_string(threads));
  }
  const double L = threads;
  return lambda_bar * lambda_bar / (L * (L - lambda_bar));
}

double load_from_queue(double queue_length, int threads) {
  if (threads < 1) throw InputError("thread count L must be >= 1");
  if (!(queue_length >= 0)) throw InputError("queue length must be non-negative");
  const double L = threads;
  if (std::isinf(queue_length)) return L;
  // L (sqrt(Q^2 + 4Q) - Q) / 2, rewritten to avoid cancellation at large Q.
  const double Q = queue_length;
  if (Q == 0) return 0.0;
  return L * 2.0 * Q / (std::sqrt(Q * Q + 4.0 * Q) + Q);
}

double static_capacity(std::span<const ClassSpec> classes,
                       std::span<const CodeChoice> codes, int threads) {
  if (threads < 1) throw InputError("thread count L must be >= 1");
  return threads / mean_usage(classes, codes);
}

double full_capacity(std::span<const ClassSpec> classes, int threads) {
  std::vector<CodeChoice> basic(classes.size(), CodeChoice{1, 1});
  return static_capacity(classes, basic, threads);
}

}  // namespace tofec
