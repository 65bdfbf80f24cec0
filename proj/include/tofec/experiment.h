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


// Runs of a scenario across arrival rates and strategies.
#pragma once

#include <string>
#include <vector>

#include "tofec/config.h"
#include "tofec/metrics.h"

namespace tofec {

// Runs `config` once with the given strategy; the selector and sampler are
// built fresh, so concurrent calls are independent.
SimResult run_scenario(const ScenarioConfig& config, const StrategySpec& strategy);

SummaryRow summary_row(const ScenarioConfig& config, const SimResult& result,
                       double lambda_per_ms);

// Expands "static-all" into every admissible static code combination and
// parses the remaining names with parse_strategy.
std::vector<StrategySpec> expand_strategies(const SystemSpec& system,
                                            const std::vector<std::string>& names);

// One Poisson run per (rate, strategy), all with the config's seed, so every
// strategy sees the same arrival sequence at a given rate. Rows come back
// ordered by rate, then strategy. `jobs` > 1 runs grid points on threads.
std::vector<SummaryRow> sweep(const ScenarioConfig& config,
                              const std::vector<double>& rates_per_ms,
                              const std::vector<StrategySpec>& strategies,
                              int jobs = 1);

enum class Metric { mean, median, p90, p99 };
Metric metric_from_string(const std::string& s);
std::string to_string(Metric m);

// Per rate, the non-overloaded static row minimizing `metric`, relabeled
// "best-static[metric]:<code>". Rates where every static row is overloaded
// yield an overloaded envelope row.
std::vector<SummaryRow> best_static_envelope(const std::vector<SummaryRow>& rows,
                                             Metric metric);

}  // namespace tofec
