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

// Per-request code selection policies.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tofec/model.h"
#include "tofec/solver.h"

namespace tofec {

// What a policy may observe when a request arrives. Both counts are taken
// before the new request joins the queue and before any dispatch it causes.
struct ArrivalContext {
  std::size_t class_id = 0;
  double now_ms = 0;
  int queue_length = 0;  // requests waiting, in-service ones excluded
  int idle_threads = 0;
};

class CodeSelector {
 public:
  virtual ~CodeSelector() = default;
  virtual CodeChoice select(const ArrivalContext& ctx) = 0;
  virtual std::string name() const = 0;
  // Fresh copy in its initial state, for running replicas independently.
  virtual std::unique_ptr<CodeSelector> clone() const = 0;
};

// Backlog-driven adaptation: an EWMA of the queue length is looked up in the
// per-class H^K and H^N tables.
class TofecSelector final : public CodeSelector {
 public:
  TofecSelector(std::vector<ClassSpec> classes, std::vector<ThresholdTable> tables,
                double alpha = kDefaultAlpha);

  // Builds the threshold tables from the class delay parameters.
  static TofecSelector for_system(const SystemSpec& system,
                                  double alpha = kDefaultAlpha);

  // Updates the EWMA with backlog q and returns the code for class_id.
  CodeChoice select_for_backlog(std::size_t class_id, int q);

  CodeChoice select(const ArrivalContext& ctx) override {
    return select_for_backlog(ctx.class_id, ctx.queue_length);
  }
  std::string name() const override { return "tofec"; }
  std::unique_ptr<CodeSelector> clone() const override;

  double smoothed_backlog() const { return smoothed_; }
  double alpha() const { return alpha_; }
  const std::vector<ThresholdTable>& tables() const { return tables_; }

  static constexpr double kDefaultAlpha = 0.99;

 private:
  std::vector<ClassSpec> classes_;
  std::vector<ThresholdTable> tables_;
  double alpha_;
  double smoothed_ = 0;
};

// k = min(k_max, l) and n = min(floor(r_max k), l) for l idle threads;
// (1, 1) when none is idle.
CodeChoice greedy_select(const ClassSpec& cls, int idle_threads);

class GreedySelector final : public CodeSelector {
 public:
  explicit GreedySelector(std::vector<ClassSpec> classes);
  CodeChoice select(const ArrivalContext& ctx) override;
  std::string name() const override { return "greedy"; }
  std::unique_ptr<CodeSelector> clone() const override;

 private:
  std::vector<ClassSpec> classes_;
};

class StaticSelector final : public CodeSelector {
 public:
  explicit StaticSelector(std::vector<CodeChoice> codes);
  CodeChoice select(const ArrivalContext& ctx) override;
  std::string name() const override;
  std::unique_ptr<CodeSelector> clone() const override;

 private:
  std::vector<CodeChoice> codes_;
};

struct IdealPhase {
  double start_ms = 0;
  double end_ms = 0;
  std::vector<CodeChoice> codes;  // per class
};

// Phase lookup; throws InputError when `now_ms` falls outside the schedule.
CodeChoice ideal_select(const std::vector<IdealPhase>& schedule,
                        std::size_t class_id, double now_ms);

// Rate-driven baseline with advance knowledge of every phase's arrival rate.
class IdealSelector final : public CodeSelector {
 public:
  // The schedule must start at 0 and be contiguous.
  explicit IdealSelector(std::vector<IdealPhase> schedule);
  CodeChoice select(const ArrivalContext& ctx) override;
  std::string name() const override { return "ideal"; }
  std::unique_ptr<CodeSelector> clone() const override;
  const std::vector<IdealPhase>& schedule() const { return schedule_; }

 private:
  std::vector<IdealPhase> schedule_;
};

// Per phase, the brute-force best static codes at that phase's rate; an
// overloaded phase gets (1, 1), the capacity-maximizing code. The last
// phase is extended to +infinity.
std::vector<IdealPhase> ideal_schedule_from_phases(const SystemSpec& system,
                                                   const std::vector<RatePhase>& phases);

}  // namespace tofec
