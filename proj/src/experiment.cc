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


#include "tofec/experiment.h"

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <thread>

#include "tofec/errors.h"

namespace tofec {
namespace {

constexpr std::size_t kMaxStaticCombinations = 100000;

double metric_of(const DelaySummary& d, Metric m) {
  switch (m) {
    case Metric::mean: return d.mean;
    case Metric::median: return d.median;
    case Metric::p90: return d.p90;
    case Metric::p99: return d.p99;
  }
  return d.mean;
}

}  // namespace

SimResult run_scenario(const ScenarioConfig& config, const StrategySpec& strategy) {
  auto sampler = make_sampler(config);
  auto selector = make_selector(config, strategy);
  return run(config.system, config.arrivals, *sampler, *selector, config.run);
}

SummaryRow summary_row(const ScenarioConfig& config, const SimResult& result,
                       double lambda_per_ms) {
  SummaryRow row;
  row.scenario = config.scenario;
  row.strategy = result.strategy;
  row.lambda_per_ms = lambda_per_ms;
  row.overloaded = result.overloaded;
  int k_max = 1;
  for (const auto& c : config.system.classes) k_max = std::max(k_max, c.k_max);
  row.k_fraction = composition(result, k_max).k_fraction;
  if (!result.overloaded && !total_delays(result).empty()) row.delays = summarize(result);
  return row;
}

std::vector<StrategySpec> expand_strategies(const SystemSpec& system,
                                            const std::vector<std::string>& names) {
  std::vector<StrategySpec> out;
  for (const auto& name : names) {
    if (name != "static-all") {
      out.push_back(parse_strategy(name));
      continue;
    }
    std::vector<std::vector<CodeChoice>> grids;
    std::size_t total = 1;
    for (const auto& c : system.classes) {
      grids.push_back(admissible_codes(c));
      total *= grids.back().size();
      if (total > kMaxStaticCombinations) {
        throw InputError("static-all would expand to too many combinations");
      }
    }
    std::vector<std::size_t> idx(grids.size(), 0);
    for (std::size_t t = 0; t < total; ++t) {
      StrategySpec s;
      s.kind = StrategySpec::Kind::fixed;
      for (std::size_t i = 0; i < grids.size(); ++i) s.codes.push_back(grids[i][idx[i]]);
      out.push_back(std::move(s));
      for (std::size_t i = grids.size(); i-- > 0;) {
        if (++idx[i] < grids[i].size()) break;
        idx[i] = 0;
      }
    }
  }
  return out;
}

std::vector<SummaryRow> sweep(const ScenarioConfig& config,
                              const std::vector<double>& rates_per_ms,
                              const std::vector<StrategySpec>& strategies, int jobs) {
  if (rates_per_ms.empty() || strategies.empty()) {
    throw InputError("sweep needs at least one rate and one strategy");
  }
  const std::size_t n = rates_per_ms.size() * strategies.size();
  std::vector<SummaryRow> rows(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const double rate = rates_per_ms[i / strategies.size()];
      const auto& strategy = strategies[i % strategies.size()];
      try {
        ScenarioConfig c = config;
        c.arrivals = ArrivalProcess::poisson(rate);
        rows[i] = summary_row(c, run_scenario(c, strategy), rate);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw InputError("sweep point failed: " + e);
  }
  return rows;
}

Metric metric_from_string(const std::string& s) {
  if (s == "mean") return Metric::mean;
  if (s == "median") return Metric::median;
  if (s == "p90") return Metric::p90;
  if (s == "p99") return Metric::p99;
  throw InputError("unknown metric '" + s + "'");
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::mean: return "mean";
    case Metric::median: return "median";
    case Metric::p90: return "p90";
    case Metric::p99: return "p99";
  }
  return "mean";
}

std::vector<SummaryRow> best_static_envelope(const std::vector<SummaryRow>& rows,
                                             Metric metric) {
  std::map<double, std::vector<const SummaryRow*>> by_rate;
  for (const auto& r : rows) {
    if (r.strategy.rfind("static(", 0) == 0) by_rate[r.lambda_per_ms].push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& [rate, candidates] : by_rate) {
    const SummaryRow* best = nullptr;
    double best_value = std::numeric_limits<double>::infinity();
    for (const auto* r : candidates) {
      if (r->overloaded || !r->delays) continue;
      const double v = metric_of(*r->delays, metric);
      if (v < best_value) {
        best_value = v;
        best = r;
      }
    }
    const std::string label = "best-static[" + to_string(metric) + "]";
    if (best) {
      SummaryRow row = *best;
      row.strategy = label + ":" + best->strategy;
      out.push_back(std::move(row));
    } else {
      SummaryRow row = *candidates.front();
      row.strategy = label;
      row.overloaded = true;
      row.delays.reset();
      out.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace tofec
