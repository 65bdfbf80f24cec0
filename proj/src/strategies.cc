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

#include "tofec/strategies.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tofec/errors.h"

namespace tofec {

TofecSelector::TofecSelector(std::vector<ClassSpec> classes,
                             std::vector<ThresholdTable> tables, double alpha)
    : classes_(std::move(classes)), tables_(std::move(tables)), alpha_(alpha) {
  if (!(alpha_ >= 0 && alpha_ <= 1)) throw InputError("alpha must lie in [0, 1]");
  if (classes_.size() != tables_.size() || classes_.empty()) {
    throw InputError("one threshold table per class is required");
  }
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (!tables_[i].interleaved()) {
      throw InputError("threshold table " + std::to_string(i) + " is not interleaved");
    }
  }
}

TofecSelector TofecSelector::for_system(const SystemSpec& system, double alpha) {
  std::vector<ThresholdTable> tables;
  for (const auto& c : system.classes) {
    tables.push_back(build_thresholds(c, system.threads));
  }
  return TofecSelector(system.classes, std::move(tables), alpha);
}

CodeChoice TofecSelector::select_for_backlog(std::size_t class_id, int q) {
  if (class_id >= classes_.size()) throw InputError("unknown class id");
  if (q < 0) throw InputError("backlog must be non-negative");
  smoothed_ = alpha_ * smoothed_ + (1.0 - alpha_) * q;
  const ClassSpec& cls = classes_[class_id];
  const ThresholdTable& table = tables_[class_id];
  const int k = std::min(table.select_k(smoothed_), cls.k_max);
  int n = std::min(table.select_n(smoothed_), cls.n_cap(k));
  // The two tables are independent; keep the MDS constraint n >= k.
  n = std::max(n, k);
  return {n, k};
}

std::unique_ptr<CodeSelector> TofecSelector::clone() const {
  return std::make_unique<TofecSelector>(classes_, tables_, alpha_);
}

CodeChoice greedy_select(const ClassSpec& cls, int idle_threads) {
  if (idle_threads < 0) throw InputError("idle thread count must be non-negative");
  if (idle_threads == 0) return {1, 1};
  const int k = std::min(cls.k_max, idle_threads);
  const int n = std::min(cls.n_cap(k), idle_threads);
  return {std::max(n, k), k};
}

GreedySelector::GreedySelector(std::vector<ClassSpec> classes)
    : classes_(std::move(classes)) {}

CodeChoice GreedySelector::select(const ArrivalContext& ctx) {
  if (ctx.class_id >= classes_.size()) throw InputError("unknown class id");
  return greedy_select(classes_[ctx.class_id], ctx.idle_threads);
}

std::unique_ptr<CodeSelector> GreedySelector::clone() const {
  return std::make_unique<GreedySelector>(classes_);
}

StaticSelector::StaticSelector(std::vector<CodeChoice> codes)
    : codes_(std::move(codes)) {
  if (codes_.empty()) throw InputError("static strategy needs one code per class");
  for (const auto& c : codes_) c.validate();
}

CodeChoice StaticSelector::select(const ArrivalContext& ctx) {
  if (ctx.class_id >= codes_.size()) throw InputError("unknown class id");
  return codes_[ctx.class_id];
}

std::string StaticSelector::name() const {
  std::string s = "static(";
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    if (i > 0) s += ";";
    s += std::to_string(codes_[i].n) + "," + std::to_string(codes_[i].k);
  }
  return s + ")";
}

std::unique_ptr<CodeSelector> StaticSelector::clone() const {
  return std::make_unique<StaticSelector>(codes_);
}

CodeChoice ideal_select(const std::vector<IdealPhase>& schedule,
                        std::size_t class_id, double now_ms) {
  auto it = std::upper_bound(
      schedule.begin(), schedule.end(), now_ms,
      [](double t, const IdealPhase& p) { return t < p.end_ms; });
  if (it == schedule.end() || now_ms < it->start_ms) {
    throw InputError("ideal schedule does not cover t = " + std::to_string(now_ms));
  }
  if (class_id >= it->codes.size()) throw InputError("unknown class id");
  return it->codes[class_id];
}

IdealSelector::IdealSelector(std::vector<IdealPhase> schedule)
    : schedule_(std::move(schedule)) {
  if (schedule_.empty()) throw InputError("ideal schedule is empty");
  if (schedule_.front().start_ms != 0) throw InputError("ideal schedule must start at 0");
  for (std::size_t i = 0; i < schedule_.size(); ++i) {
    const auto& p = schedule_[i];
    if (!(p.end_ms > p.start_ms)) throw InputError("ideal phase has non-positive length");
    if (i > 0 && p.start_ms != schedule_[i - 1].end_ms) {
      throw InputError("ideal schedule has a gap or overlap at " +
                       std::to_string(p.start_ms) + " ms");
    }
    if (p.codes.empty()) throw InputError("ideal phase has no codes");
    for (const auto& c : p.codes) c.validate();
  }
}

CodeChoice IdealSelector::select(const ArrivalContext& ctx) {
  return ideal_select(schedule_, ctx.class_id, ctx.now_ms);
}

std::unique_ptr<CodeSelector> IdealSelector::clone() const {
  return std::make_unique<IdealSelector>(schedule_);
}

std::vector<IdealPhase> ideal_schedule_from_phases(const SystemSpec& system,
                                                   const std::vector<RatePhase>& phases) {
  system.validate();
  if (phases.empty()) throw InputError("no phases to schedule");
  std::vector<IdealPhase> out;
  double t = 0;
  for (const auto& ph : phases) {
    if (!(ph.duration_ms > 0)) throw InputError("phase duration must be positive");
    IdealPhase p;
    p.start_ms = t;
    p.end_ms = t + ph.duration_ms;
    try {
      p.codes = brute_force_best_static(system.classes, ph.rate_per_ms,
                                        system.threads)
                    .codes;
    } catch (const OverloadError&) {
      p.codes.assign(system.classes.size(), CodeChoice{1, 1});
    }
    out.push_back(std::move(p));
    t += ph.duration_ms;
  }
  out.back().end_ms = std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace tofec
