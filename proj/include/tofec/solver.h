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

// Delay-optimal code length and dimension as functions of load and backlog.
//
// For a class with file size J and delay law (Δ̄, Δ̃, Ψ̄, Ψ̃), the optimal
// real-valued (k, r) at normalized load λ̄ satisfies
//
//   k = Ω(r),  the positive root of  k(Ψ̄k + Ψ̃J) / (Δ̄k + Δ̃J) = Γ(r),
//   π(r) = (L / (L - λ̄))^2 - 1,
//
// where Γ(r) = J r(r-1) / (Δ̄r + Ψ̄) · (Δ̃ + Ψ̃ ln(r/(r-1))) and
// π(r) = L(Ψ̄k + Ψ̃J) / (k r(r-1)(Δ̄k + Δ̃J)) at k = Ω(r). Ω is increasing
// and π decreasing in r, so every solve below is a bracketed bisection.
// Classes only interact through λ̄, which is why thresholds are per class.

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "tofec/model.h"

namespace tofec {

struct ContinuousCode {
  double n = 0;
  double k = 0;
  double r = 0;
};

struct ContinuousOptimum {
  std::vector<ContinuousCode> codes;  // one per class
  double lambda_bar = 0;
  double queue_length = 0;
};

double gamma_of_ratio(const ClassSpec& cls, double r);
double k_of_ratio(const ClassSpec& cls, double r);
double pi_of_ratio(const ClassSpec& cls, double r, int threads);

// (L / (L - λ̄))^2 - 1
double load_pressure(double lambda_bar, int threads);

// Unique r with π(r) = load_pressure(λ̄), together with k = Ω(r), n = r k.
// Requires 0 < λ̄ < L.
ContinuousCode solve_class_at_load(const ClassSpec& cls, double lambda_bar,
                                   int threads);

ContinuousOptimum optimal_codes_multiclass(std::span<const ClassSpec> classes,
                                           double lambda_bar, int threads);

// Same optimum parameterized by the request rate instead of λ̄: finds the
// self-consistent λ̄ = λ Σ p_i U_i(k_i, r_i). Throws OverloadError when no
// code keeps the queue stable.
ContinuousOptimum optimal_codes_at_rate(std::span<const ClassSpec> classes,
                                        double lambda, int threads);

// N(Q), K(Q), R(Q). Q = 0 yields infinities; Q < 0 is rejected.
ContinuousCode code_functions_of_queue(const ClassSpec& cls, double queue_length,
                                       int threads);

// Backlog at which the uncapped optimal length (dimension) equals n (k).
double invert_n(const ClassSpec& cls, double n, int threads);
double invert_k(const ClassSpec& cls, double k, int threads);

struct ThresholdTable {
  // Entry i holds index i+1: queue_n[i] = Q^N_{i+1}, bound_n[i] = H^N_{i+1}.
  std::vector<double> queue_n;  // n = 1..n_max
  std::vector<double> bound_n;  // n = 1..n_max+1, front = inf, back = 0
  std::vector<double> queue_k;  // k = 1..k_max
  std::vector<double> bound_k;  // k = 1..k_max+1

  int n_max() const { return static_cast<int>(queue_n.size()); }
  int k_max() const { return static_cast<int>(queue_k.size()); }

  // The n (k) whose interval [H_{n+1}, H_n) contains q.
  int select_n(double q) const;
  int select_k(double q) const;

  // Strict H_1 > Q_1 > H_2 > ... > Q_max > H_{max+1} = 0 for both tables.
  bool interleaved() const;
};

ThresholdTable build_thresholds(const ClassSpec& cls, int threads);

// Columns: class_id,kind,index,Q_value,H_value (Q_value empty on the final
// H row of each kind).
void write_thresholds_csv(std::ostream& out,
                          std::span<const ThresholdTable> tables);

// All integer codes allowed by the class caps: 1 <= k <= k_max,
// k <= n <= floor(r_max k).
std::vector<CodeChoice> admissible_codes(const ClassSpec& cls);

// Service delay used by the brute-force objective: the log form for n > k
// and the exact harmonic form on the n == k diagonal, where the log form
// diverges.
double objective_service_delay(const ClassSpec& cls, CodeChoice code);

// D_q + Σ p_i D_s,i for fixed integer codes; +inf when unstable.
double static_objective(std::span<const ClassSpec> classes,
                        std::span<const CodeChoice> codes, double lambda,
                        int threads);

struct StaticOptimum {
  std::vector<CodeChoice> codes;
  double objective = 0;
};

// Exhaustive argmin of static_objective over admissible_codes of every
// class. Ties go to the smallest n, then the smallest k, class by class.
// Throws OverloadError when no combination is stable.
StaticOptimum brute_force_best_static(std::span<const ClassSpec> classes,
                                      double lambda, int threads);

// Same search over caller-supplied per-class grids.
StaticOptimum brute_force_best_static(
    std::span<const ClassSpec> classes, double lambda, int threads,
    std::span<const std::vector<CodeChoice>> grids);

// Every (n, k) with 1 <= k <= k_max and k <= n <= n_max, ordered by n then k.
std::vector<CodeChoice> code_grid(int k_max, int n_max);

}  // namespace tofec
