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


#include <string>

#include "doctest.h"
#include "tofec/config.h"
#include "tofec/errors.h"
#include "tofec/experiment.h"

using namespace tofec;

namespace {

const char* kBase = R"({
  "scenario": "unit",
  "system": {"L": 16},
  "classes": [{"file_size_mb": 3, "k_max": 6, "r_max": 2,
               "params": {"delta_base_ms": 20, "delta_slope_ms_per_mb": 20,
                          "psi_base_ms": 10, "psi_slope_ms_per_mb": 15}}],
  "arrivals": {"kind": "poisson", "rate_per_s": 40},
  "strategy": "tofec",
  "horizon_ms": 20000,
  "seed": 5
})";

std::string with(const std::string& key, const std::string& value) {
  std::string s = kBase;
  const auto at = s.find("\"" + key + "\"");
  if (at == std::string::npos) return "{\"" + key + "\": " + value + "," + s.substr(1);
  const auto end = s.find('\n', at);
  return s.substr(0, at) + "\"" + key + "\": " + value + "," + s.substr(end);
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(kBase);
  CHECK(c.scenario == "unit");
  CHECK(c.system.threads == 16);
  CHECK(c.system.classes[0].params == DelayParams{20, 20, 10, 15});
  CHECK(c.arrivals.rate_per_ms == doctest::Approx(0.04));
  CHECK(c.strategy.kind == StrategySpec::Kind::tofec);
  CHECK(c.run.seed == 5);
  CHECK(c.run.effective_warmup() == 2000);
  CHECK(c.run.leftover == LeftoverPolicy::cancel);
  CHECK(c.run.overload_bound == 100000);
  CHECK(c.canonical_json.find("\"seed\":5") != std::string::npos);
}

TEST_CASE("strategy forms") {
  CHECK(parse_strategy("greedy").kind == StrategySpec::Kind::greedy);
  const auto s = parse_strategy("static(6,3)");
  CHECK(s.kind == StrategySpec::Kind::fixed);
  CHECK(s.codes[0] == CodeChoice{6, 3});
  CHECK(parse_strategy("static(2,1;4,2)").codes.size() == 2);
  CHECK(strategy_label(s) == "static(6,3)");
  CHECK_THROWS_AS(parse_strategy("static(1,2)"), InputError);
  CHECK_THROWS_AS(parse_strategy("best"), InputError);

  const auto t = parse_config(with("strategy", R"({"kind": "tofec", "alpha": 0.5})"));
  CHECK(t.strategy.alpha == 0.5);
  const auto f = parse_config(with("strategy", R"({"kind": "static", "codes": [[4, 2]]})"));
  CHECK(f.strategy.codes[0] == CodeChoice{4, 2});
  const auto i = parse_config(with(
      "strategy",
      R"({"kind": "ideal", "schedule": [{"start_ms": 0, "end_ms": 1e9, "codes": [[2, 1]]}]})"));
  CHECK(i.strategy.schedule.size() == 1);
}

TEST_CASE("phased arrivals and derived ideal schedule") {
  const auto c = parse_config(with("arrivals",
      R"({"kind": "phased", "phases": [{"duration_s": 10, "rate_per_s": 10},
                                        {"duration_ms": 10000, "rate_per_ms": 0.5}]})"));
  REQUIRE(c.arrivals.phases.size() == 2);
  CHECK(c.arrivals.phases[0].duration_ms == 10000);
  CHECK(c.arrivals.phases[0].rate_per_ms == doctest::Approx(0.01));
  auto sel = make_selector(c, parse_strategy("ideal"));
  auto* ideal = dynamic_cast<IdealSelector*>(sel.get());
  REQUIRE(ideal != nullptr);
  CHECK(ideal->schedule()[1].codes[0] == CodeChoice{1, 1});
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("{"), InputError);
  CHECK_THROWS_AS(parse_config(with("horizon_ms", "-1")), InputError);
  CHECK_THROWS_AS(parse_config(with("arrivals", R"({"kind": "bursty"})")), InputError);
  CHECK_THROWS_AS(parse_config(with("leftover_policy", R"("drop")")), InputError);
  CHECK_THROWS_AS(parse_config(with("system", R"({"L": 0})")), InputError);
  CHECK_THROWS_AS(parse_config(with("sampler", R"({"kind": "empirical", "trace": "/nonexistent.csv"})")),
                  InputError);
}

TEST_CASE("scenario files load") {
  const std::string dir = TOFEC_SCENARIO_DIR;
  for (const char* name : {"poisson.json", "three_phase.json", "trace_driven.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(dir + "/" + name));
  }
  const auto t = load_config(dir + "/trace_driven.json");
  CHECK(t.sampler.kind == SamplerSpec::Kind::empirical);
  REQUIRE(t.sampler.fit);
  CHECK(t.system.classes[0].params == t.sampler.fit->params);
}

TEST_CASE("sweep rows and best-static envelope") {
  auto c = parse_config(kBase);
  c.run.horizon_ms = 20000;
  const auto specs = expand_strategies(c.system, {"tofec", "static-all"});
  CHECK(specs.size() == 28);
  const auto rows = sweep(c, {0.01, 0.05}, specs, 4);
  CHECK(rows.size() == 56);
  CHECK(rows[0].strategy == "tofec");
  CHECK(rows[0].lambda_per_ms == 0.01);
  CHECK(rows[28].lambda_per_ms == 0.05);
  const auto env = best_static_envelope(rows, Metric::mean);
  REQUIRE(env.size() == 2);
  CHECK(env[0].strategy.rfind("best-static[mean]:static(", 0) == 0);
  for (const auto& r : rows) {
    if (r.lambda_per_ms == 0.01 && r.strategy.rfind("static", 0) == 0 && r.delays) {
      CHECK(env[0].delays->mean <= r.delays->mean);
    }
  }
  const auto again = sweep(c, {0.01, 0.05}, specs, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].delays->mean == again[i].delays->mean);
  }
}
