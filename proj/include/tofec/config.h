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


// JSON scenario files: one file describes one reproducible run.
//
//   {
//     "scenario": "name",
//     "system": {"L": 16},
//     "classes": [{"op": "read", "file_size_mb": 3, "popularity": 1,
//                  "k_max": 6, "r_max": 2,
//                  "params": {"delta_base_ms": 55, "delta_slope_ms_per_mb": 14,
//                             "psi_base_ms": 18, "psi_slope_ms_per_mb": 30}}],
//     "arrivals": {"kind": "poisson", "rate_per_s": 40},
//     "sampler": {"kind": "parametric"},
//     "strategy": "tofec",
//     "horizon_ms": 600000, "warmup_ms": 60000, "seed": 1,
//     "leftover_policy": "cancel", "overload_bound": 100000
//   }
//
// A class may instead give "params_file" (key = value file) or
// "params": "fitted" to take the parameters fitted from the sampler trace.
// Arrivals: poisson {rate_per_s | rate_per_ms}, phased {phases: [{duration_s |
// duration_ms, rate_per_s | rate_per_ms}]}, trace {timestamps_ms: [...],
// classes: [...]}. Sampler: parametric, or empirical {trace: path}.
// Strategy: "tofec", "greedy", "static(n,k)", "ideal", or an object
// {"kind": "tofec", "alpha": a} / {"kind": "static", "codes": [[n, k], ...]}
// / {"kind": "ideal", "schedule": [{"start_ms", "end_ms", "codes"}]}. An
// ideal strategy without a schedule is derived from phased arrivals.
// Relative paths resolve against the config file's directory.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tofec/engine.h"
#include "tofec/strategies.h"
#include "tofec/traces.h"

namespace tofec {

struct StrategySpec {
  enum class Kind { tofec, greedy, fixed, ideal };
  Kind kind = Kind::tofec;
  double alpha = TofecSelector::kDefaultAlpha;
  std::vector<CodeChoice> codes;     // fixed: one per class, or one for all
  std::vector<IdealPhase> schedule;  // ideal: empty means derive from phases
};

// Accepts "tofec", "greedy", "ideal", "static(n,k)" and "static(n,k;n,k)".
StrategySpec parse_strategy(const std::string& text);
std::string strategy_label(const StrategySpec& spec);

struct SamplerSpec {
  enum class Kind { parametric, empirical };
  Kind kind = Kind::parametric;
  std::string trace_path;
  std::vector<TraceRecord> records;
  std::optional<FitReport> fit;
};

struct ScenarioConfig {
  std::string scenario = "scenario";
  SystemSpec system;
  ArrivalProcess arrivals;
  SamplerSpec sampler;
  StrategySpec strategy;
  RunOptions run;
  std::string canonical_json;  // the parsed config, for provenance headers
};

ScenarioConfig parse_config(const std::string& json_text,
                            const std::string& base_dir = ".");
ScenarioConfig load_config(const std::string& path);

std::unique_ptr<DelaySampler> make_sampler(const ScenarioConfig& config);
std::unique_ptr<CodeSelector> make_selector(const ScenarioConfig& config,
                                            const StrategySpec& strategy);

}  // namespace tofec
