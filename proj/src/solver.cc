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

#include "tofec/solver.h"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "tofec/errors.h"

namespace tofec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Search range for s = r - 1. Bisection runs on ln(s).
constexpr double kExcessFloor = 1e-200;
constexpr double kExcessCeil = 1e15;

// Relative residual below which bisection stops early.
constexpr double kResidualTol = 1e-13;

void require_ratio(double r) {
  if (!(r > 1.0)) throw InputError("redundancy ratio must exceed 1");
}

void require_threads(int threads) {
  if (threads < 1) throw InputError("thread count L must be >= 1");
}

// Γ with s = r - 1, keeping precision for r close to 1.
double gamma_of_excess(const ClassSpec& cls, double s) {
  const auto& p = cls.params;
  const double J = cls.file_size_mb;
  const double r = 1.0 + s;
  return J * r * s / (p.delta_base * r + p.psi_base) *
         (p.delta_slope + p.psi_slope * std::log1p(1.0 / s));
}

// Positive root of  Ψ̄k² + (Ψ̃J - Δ̄Γ)k - Δ̃JΓ = 0.
double k_of_excess(const ClassSpec& cls, double s) {
  const auto& p = cls.params;
  const double J = cls.file_size_mb;
  const double g = gamma_of_excess(cls, s);
  const double b = p.psi_slope * J - p.delta_base * g;
  const double c = p.delta_slope * J * g;
  const double disc = std::sqrt(b * b + 4.0 * p.psi_base * c);
  if (b >= 0) {
    // Vieta form; also covers the Ψ̄ = 0 linear limit k = Δ̃JΓ / (Ψ̃J - Δ̄Γ).
    if (b + disc == 0) return 0.0;
    return 2.0 * c / (b + disc);
  }
  if (p.psi_base == 0) {
    throw InputError("psi_base = 0 with psi_slope*J <= delta_base*Gamma: "
                     "no positive optimal dimension");
  }
  return (-b + disc) / (2.0 * p.psi_base);
}

double pi_of_excess(const ClassSpec& cls, double s, int threads) {
  const auto& p = cls.params;
  const double J = cls.file_size_mb;
  const double k = k_of_excess(cls, s);
  const double r = 1.0 + s;
  const double den = k * r * s * (p.delta_base * k + p.delta_slope * J);
  if (den == 0) return kInf;
  return threads * (p.psi_base * k + p.psi_slope * J) / den;
}

// Root of a strictly decreasing f on [lo, hi] (lo, hi > 0) by bisection in
// log space. f(lo) > 0 > f(hi) is the caller's responsibility.
template <class F>
double bisect_log_decreasing(F&& f, double lo, double hi) {
  double best = lo;
  double best_abs = kInf;
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (!(mid > lo && mid < hi)) break;
    const double v = f(mid);
    if (std::abs(v) < best_abs) {
      best_abs = std::abs(v);
      best = mid;
    }
    if (std::abs(v) <= kResidualTol) break;
    if (v > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

// Brackets and solves g(s) = 0 for g strictly decreasing in s.
template <class F>
double solve_excess_decreasing(F&& g, const char* what) {
  double lo = 1e-9;
  while (!(g(lo) > 0)) {
    lo *= 1e-3;
    if (lo < kExcessFloor) {
      throw NumericError(std::string("cannot bracket ") + what + " near r = 1");
    }
  }
  double hi = 1.0;
  while (!(g(hi) < 0)) {
    hi *= 2.0;
    if (hi > kExcessCeil) {
      throw NumericError(std::string("cannot bracket ") + what + " at large r");
    }
  }
  return bisect_log_decreasing(g, lo, hi);
}

ContinuousCode code_at_excess(const ClassSpec& cls, double s) {
  const double k = k_of_excess(cls, s);
  const double r = 1.0 + s;
  return {r * k, k, r};
}

// λ̄ at which π(r) is optimal, and the matching backlog.
double queue_at_excess(const ClassSpec& cls, double s, int threads) {
  const double tau = pi_of_excess(cls, s, threads);
  const double root = std::sqrt(1.0 + tau);
  const double L = threads;
  const double lambda_bar = L * tau / (root * (root + 1.0));  // L(1 - 1/root)
  // L - λ̄ = L / root, so Q = λ̄² root / L².
  return lambda_bar * lambda_bar * root / (L * L);
}

double invert_excess(const ClassSpec& cls, double target, bool by_length,
                     int threads) {
  if (!(target > 0) || !std::isfinite(target)) {
    throw InputError("code parameter to invert must be positive and finite");
  }
  auto g = [&](double s) {
    const ContinuousCode c = code_at_excess(cls, s);
    const double value = by_length ? c.n : c.k;
    return 1.0 - value / target;  // decreasing in s
  };
  const double s = solve_excess_decreasing(g, by_length ? "N^-1" : "K^-1");
  return queue_at_excess(cls, s, threads);
}

}  // namespace

double gamma_of_ratio(const ClassSpec& cls, double r) {
  require_ratio(r);
  return gamma_of_excess(cls, r - 1.0);
}

double k_of_ratio(const ClassSpec& cls, double r) {
  require_ratio(r);
  return k_of_excess(cls, r - 1.0);
}

double pi_of_ratio(const ClassSpec& cls, double r, int threads) {
  require_ratio(r);
  require_threads(threads);
  return pi_of_excess(cls, r - 1.0, threads);
}

double load_pressure(double lambda_bar, int threads) {
  require_threads(threads);
  const double L = threads;
  if (!(lambda_bar >= 0 && lambda_bar < L)) {
    throw InputError("normalized load must lie in [0, L)");
  }
  const double x = L / (L - lambda_bar);
  return x * x - 1.0;
}

ContinuousCode solve_class_at_load(const ClassSpec& cls, double lambda_bar,
                                   int threads) {
  require_threads(threads);
  if (!(lambda_bar > 0 && lambda_bar < threads)) {
    throw InputError("normalized load must lie in (0, L)");
  }
  const double tau = load_pressure(lambda_bar, threads);
  auto g = [&](double s) { return pi_of_excess(cls, s, threads) / tau - 1.0; };
  return code_at_excess(cls, solve_excess_decreasing(g, "pi(r) = tau"));
}

ContinuousOptimum optimal_codes_multiclass(std::span<const ClassSpec> classes,
                                           double lambda_bar, int threads) {
  if (classes.empty()) throw InputError("at least one class is required");
  ContinuousOptimum out;
  out.lambda_bar = lambda_bar;
  out.queue_length = mean_queue_length(lambda_bar, threads);
  out.codes.reserve(classes.size());
  for (const auto& cls : classes) {
    out.codes.push_back(solve_class_at_load(cls, lambda_bar, threads));
  }
  return out;
}

ContinuousOptimum optimal_codes_at_rate(std::span<const ClassSpec> classes,
                                        double lambda, int threads) {
  require_threads(threads);
  if (classes.empty()) throw InputError("at least one class is required");
  if (!(lambda > 0)) throw InputError("arrival rate must be positive");
  const double L = threads;

  // Usage per request tends to (Δ̃ + Ψ̃)J as k -> 0 and r -> 1.
  double min_usage = 0;
  for (const auto& c : classes) {
    min_usage += c.popularity * (c.params.delta_slope + c.params.psi_slope) *
                 c.file_size_mb;
  }
  if (lambda * min_usage >= L) {
    throw OverloadError("arrival rate exceeds every continuous code's capacity");
  }

  // h(x) = λ Ū(codes at λ̄ = xL) / L - x is strictly decreasing in x.
  auto h = [&](double x) {
    double usage = 0;
    for (const auto& c : classes) {
      const ContinuousCode code = solve_class_at_load(c, x * L, threads);
      usage += c.popularity * usage_continuous(c, code.k, code.r);
    }
    return lambda * usage / L - x;
  };
  double lo = 1e-12;
  double hi = 1.0 - 1e-12;
  if (!(h(lo) > 0) || !(h(hi) < 0)) {
    throw NumericError("cannot bracket the self-consistent normalized load");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double v = h(mid);
    if (v == 0) {
      lo = hi = mid;
      break;
    }
    (v > 0 ? lo : hi) = mid;
  }
  return optimal_codes_multiclass(classes, 0.5 * (lo + hi) * L, threads);
}

ContinuousCode code_functions_of_queue(const ClassSpec& cls, double queue_length,
                                       int threads) {
  if (!(queue_length >= 0)) throw InputError("queue length must be non-negative");
  if (queue_length == 0) return {kInf, kInf, kInf};
  const double lambda_bar = load_from_queue(queue_length, threads);
  if (!(lambda_bar < threads)) {
    throw NumericError("queue length too large to resolve the normalized load");
  }
  return solve_class_at_load(cls, lambda_bar, threads);
}

double invert_n(const ClassSpec& cls, double n, int threads) {
  require_threads(threads);
  return invert_excess(cls, n, true, threads);
}

double invert_k(const ClassSpec& cls, double k, int threads) {
  require_threads(threads);
  return invert_excess(cls, k, false, threads);
}

namespace {

int select_from(const std::vector<double>& bounds, double q) {
  const int max = static_cast<int>(bounds.size()) - 1;
  for (int i = max; i >= 1; --i) {
    if (q < bounds[i - 1]) return i;
  }
  return 1;
}

bool chain_ok(const std::vector<double>& queue, const std::vector<double>& bound) {
  if (bound.size() != queue.size() + 1 || queue.empty()) return false;
  if (!std::isinf(bound.front()) || bound.back() != 0.0) return false;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    if (!(bound[i] > queue[i] && queue[i] > bound[i + 1])) return false;
  }
  return true;
}

void fill_bounds(const std::vector<double>& queue, std::vector<double>& bound) {
  bound.assign(queue.size() + 1, 0.0);
  bound.front() = kInf;
  for (std::size_t i = 1; i < queue.size(); ++i) {
    bound[i] = 0.5 * (queue[i] + queue[i - 1]);
  }
  bound.back() = 0.0;
}

}  // namespace

int ThresholdTable::select_n(double q) const { return select_from(bound_n, q); }

int ThresholdTable::select_k(double q) const { return select_from(bound_k, q); }

bool ThresholdTable::interleaved() const {
  return chain_ok(queue_n, bound_n) && chain_ok(queue_k, bound_k);
}

ThresholdTable build_thresholds(const ClassSpec& cls, int threads) {
  cls.validate();
  require_threads(threads);
  ThresholdTable t;
  const int n_max = cls.n_max();
  for (int n = 1; n <= n_max; ++n) t.queue_n.push_back(invert_n(cls, n, threads));
  for (int k = 1; k <= cls.k_max; ++k) t.queue_k.push_back(invert_k(cls, k, threads));
  fill_bounds(t.queue_n, t.bound_n);
  fill_bounds(t.queue_k, t.bound_k);
  return t;
}

void write_thresholds_csv(std::ostream& out,
                          std::span<const ThresholdTable> tables) {
  out << "class_id,kind,index,Q_value,H_value\n";
  const auto old_precision = out.precision(12);
  auto emit = [&](std::size_t id, char kind, const std::vector<double>& queue,
                  const std::vector<double>& bound) {
    for (std::size_t i = 0; i < bound.size(); ++i) {
      out << id << ',' << kind << ',' << (i + 1) << ',';
      if (i < queue.size()) out << queue[i];
      out << ',';
      if (std::isinf(bound[i])) {
        out << "inf";
      } else {
        out << bound[i];
      }
      out << '\n';
    }
  };
  for (std::size_t id = 0; id < tables.size(); ++id) {
    emit(id, 'N', tables[id].queue_n, tables[id].bound_n);
    emit(id, 'K', tables[id].queue_k, tables[id].bound_k);
  }
  out.precision(old_precision);
}

std::vector<CodeChoice> code_grid(int k_max, int n_max) {
  std::vector<CodeChoice> codes;
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 1; k <= std::min(n, k_max); ++k) codes.push_back({n, k});
  }
  return codes;
}

std::vector<CodeChoice> admissible_codes(const ClassSpec& cls) {
  std::vector<CodeChoice> codes;
  for (int n = 1; n <= cls.n_max(); ++n) {
    for (int k = 1; k <= std::min(n, cls.k_max); ++k) {
      if (n <= cls.n_cap(k)) codes.push_back({n, k});
    }
  }
  return codes;
}

double objective_service_delay(const ClassSpec& cls, CodeChoice code) {
  return expected_service_delay(cls, code,
                                code.n == code.k ? ServiceDelayMode::exact_harmonic
                                                 : ServiceDelayMode::log_approx);
}

double static_objective(std::span<const ClassSpec> classes,
                        std::span<const CodeChoice> codes, double lambda,
                        int threads) {
  const double ubar = mean_usage(classes, codes);
  const double lambda_bar = lambda * ubar;
  if (!is_stable(lambda_bar, threads)) return kInf;
  double total = queueing_delay(lambda_bar, threads, ubar);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    total += classes[i].popularity * objective_service_delay(classes[i], codes[i]);
  }
  return total;
}

StaticOptimum brute_force_best_static(std::span<const ClassSpec> classes,
                                      double lambda, int threads) {
  require_threads(threads);
  if (classes.empty()) throw InputError("at least one class is required");
  if (!(lambda >= 0)) throw InputError("arrival rate must be non-negative");

  std::vector<std::vector<CodeChoice>> grids;
  for (const auto& c : classes) grids.push_back(admissible_codes(c));
  return brute_force_best_static(classes, lambda, threads, grids);
}

StaticOptimum brute_force_best_static(
    std::span<const ClassSpec> classes, double lambda, int threads,
    std::span<const std::vector<CodeChoice>> grids) {
  require_threads(threads);
  if (classes.empty() || grids.size() != classes.size()) {
    throw InputError("one code grid per class is required");
  }
  if (!(lambda >= 0)) throw InputError("arrival rate must be non-negative");
  double combos = 1;
  for (const auto& g : grids) {
    if (g.empty()) throw InputError("empty code grid");
    for (const auto& code : g) code.validate();
    combos *= static_cast<double>(g.size());
  }
  if (combos > 5e7) throw InputError("brute-force grid too large");

  std::vector<std::size_t> idx(classes.size(), 0);
  std::vector<CodeChoice> current(classes.size());
  StaticOptimum best;
  best.objective = kInf;
  while (true) {
    for (std::size_t i = 0; i < classes.size(); ++i) current[i] = grids[i][idx[i]];
    const double v = static_objective(classes, current, lambda, threads);
    if (v < best.objective) {
      best.objective = v;
      best.codes = current;
    }
    // Odometer with the last class varying fastest, so iteration order is
    // lexicographic in (class 0 code, class 1 code, ...).
    std::size_t pos = classes.size();
    while (pos > 0) {
      --pos;
      if (++idx[pos] < grids[pos].size()) break;
      idx[pos] = 0;
      if (pos == 0) {
        pos = classes.size() + 1;
        break;
      }
    }
    if (pos == classes.size() + 1) break;
  }
  if (!std::isfinite(best.objective)) {
    throw OverloadError("no static code keeps the request queue stable");
  }
  return best;
}

}  // namespace tofec
