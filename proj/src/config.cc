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


#include "tofec/config.h"

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "tofec/errors.h"

namespace tofec {
namespace {

using nlohmann::json;

std::string resolve(const std::string& base, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base) / p).string();
}

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing key ") + key);
  if (!j.at(key).is_number()) throw InputError(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

// Rate in requests per ms from either unit.
double rate(const json& j) {
  if (j.contains("rate_per_ms")) return number(j, "rate_per_ms");
  if (j.contains("rate_per_s")) return number(j, "rate_per_s") / 1000.0;
  throw InputError("arrival rate needs rate_per_ms or rate_per_s");
}

double duration(const json& j) {
  if (j.contains("duration_ms")) return number(j, "duration_ms");
  if (j.contains("duration_s")) return number(j, "duration_s") * 1000.0;
  throw InputError("phase needs duration_ms or duration_s");
}

CodeChoice code_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InputError("a code is written [n, k]");
  CodeChoice c{j[0].get<int>(), j[1].get<int>()};
  c.validate();
  return c;
}

DelayParams params_from_json(const json& j) {
  return {number(j, "delta_base_ms"), number(j, "delta_slope_ms_per_mb"),
          number(j, "psi_base_ms"), number(j, "psi_slope_ms_per_mb")};
}

StrategySpec strategy_from_json(const json& j) {
  if (j.is_string()) return parse_strategy(j.get<std::string>());
  if (!j.is_object() || !j.contains("kind")) throw InputError("strategy needs a kind");
  StrategySpec s = parse_strategy(j.at("kind").get<std::string>() == "static"
                                      ? "static(1,1)"
                                      : j.at("kind").get<std::string>());
  if (s.kind == StrategySpec::Kind::tofec && j.contains("alpha")) {
    s.alpha = number(j, "alpha");
    if (!(s.alpha >= 0 && s.alpha <= 1)) throw InputError("alpha must lie in [0, 1]");
  }
  if (s.kind == StrategySpec::Kind::fixed) {
    s.codes.clear();
    for (const auto& c : j.at("codes")) s.codes.push_back(code_from_json(c));
    if (s.codes.empty()) throw InputError("static strategy needs codes");
  }
  if (s.kind == StrategySpec::Kind::ideal && j.contains("schedule")) {
    for (const auto& p : j.at("schedule")) {
      IdealPhase phase{number(p, "start_ms"), number(p, "end_ms"), {}};
      for (const auto& c : p.at("codes")) phase.codes.push_back(code_from_json(c));
      s.schedule.push_back(std::move(phase));
    }
  }
  return s;
}

}  // namespace

StrategySpec parse_strategy(const std::string& text) {
  StrategySpec s;
  if (text == "tofec") return s;
  if (text == "greedy") {
    s.kind = StrategySpec::Kind::greedy;
    return s;
  }
  if (text == "ideal") {
    s.kind = StrategySpec::Kind::ideal;
    return s;
  }
  static const std::regex outer(R"(static\((.*)\))");
  static const std::regex pair(R"(\s*(\d+)\s*,\s*(\d+)\s*)");
  std::smatch m;
  if (std::regex_match(text, m, outer)) {
    s.kind = StrategySpec::Kind::fixed;
    std::stringstream ss(m[1].str());
    std::string item;
    while (std::getline(ss, item, ';')) {
      std::smatch pm;
      if (!std::regex_match(item, pm, pair)) {
        throw InputError("bad static code '" + item + "'");
      }
      CodeChoice c{std::stoi(pm[1].str()), std::stoi(pm[2].str())};
      c.validate();
      s.codes.push_back(c);
    }
    if (s.codes.empty()) throw InputError("static strategy needs codes");
    return s;
  }
  throw InputError("unknown strategy '" + text + "'");
}

std::string strategy_label(const StrategySpec& spec) {
  switch (spec.kind) {
    case StrategySpec::Kind::tofec: return "tofec";
    case StrategySpec::Kind::greedy: return "greedy";
    case StrategySpec::Kind::ideal: return "ideal";
    case StrategySpec::Kind::fixed: return StaticSelector(spec.codes).name();
  }
  return "unknown";
}

ScenarioConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    ScenarioConfig c;
    c.canonical_json = j.dump();
    c.scenario = j.value("scenario", c.scenario);

    c.system.threads = j.at("system").at("L").get<int>();

    // Sampler first: classes may take their parameters from its trace fit.
    const json sj = j.value("sampler", json{{"kind", "parametric"}});
    const std::string skind = sj.value("kind", "parametric");
    if (skind == "empirical") {
      c.sampler.kind = SamplerSpec::Kind::empirical;
      c.sampler.trace_path = resolve(base_dir, sj.at("trace").get<std::string>());
      c.sampler.records = read_trace_file(c.sampler.trace_path);
      c.sampler.fit = fit_params(c.sampler.records);
    } else if (skind != "parametric") {
      throw InputError("unknown sampler kind '" + skind + "'");
    }

    for (const auto& cj : j.at("classes")) {
      ClassSpec cls;
      cls.op = op_type_from_string(cj.value("op", std::string("read")));
      cls.file_size_mb = number(cj, "file_size_mb");
      cls.popularity = cj.contains("popularity") ? number(cj, "popularity") : 1.0;
      cls.k_max = cj.at("k_max").get<int>();
      cls.r_max = number(cj, "r_max");
      if (cj.contains("params_file")) {
        cls.params = read_params_file(resolve(base_dir, cj.at("params_file").get<std::string>()));
      } else if (cj.contains("params") && cj.at("params").is_string()) {
        if (cj.at("params").get<std::string>() != "fitted" || !c.sampler.fit) {
          throw InputError("\"params\": \"fitted\" needs an empirical sampler");
        }
        cls.params = c.sampler.fit->params;
      } else {
        cls.params = params_from_json(cj.at("params"));
      }
      c.system.classes.push_back(cls);
    }
    c.system.validate();

    const json& aj = j.at("arrivals");
    const std::string akind = aj.value("kind", "poisson");
    if (akind == "poisson") {
      c.arrivals = ArrivalProcess::poisson(rate(aj));
    } else if (akind == "phased") {
      std::vector<RatePhase> phases;
      for (const auto& p : aj.at("phases")) phases.push_back({duration(p), rate(p)});
      c.arrivals = ArrivalProcess::phased(std::move(phases));
    } else if (akind == "trace") {
      c.arrivals = ArrivalProcess::trace(
          aj.at("timestamps_ms").get<std::vector<double>>(),
          aj.value("classes", std::vector<std::size_t>{}));
    } else {
      throw InputError("unknown arrival kind '" + akind + "'");
    }
    c.arrivals.validate();

    c.strategy = strategy_from_json(j.value("strategy", json("tofec")));

    c.run.horizon_ms = number(j, "horizon_ms");
    c.run.warmup_ms = j.contains("warmup_ms") ? number(j, "warmup_ms") : -1.0;
    c.run.seed = j.value("seed", std::uint64_t{1});
    c.run.leftover = leftover_policy_from_string(j.value("leftover_policy", std::string("cancel")));
    c.run.overload_bound = j.value("overload_bound", std::size_t{100000});
    if (!(c.run.horizon_ms > 0)) throw InputError("horizon_ms must be positive");
    if (c.run.effective_warmup() >= c.run.horizon_ms) {
      throw InputError("warmup_ms must be smaller than horizon_ms");
    }
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

std::unique_ptr<DelaySampler> make_sampler(const ScenarioConfig& config) {
  if (config.sampler.kind == SamplerSpec::Kind::parametric) {
    return std::make_unique<ParametricSampler>();
  }
  std::optional<DelayParams> fitted;
  if (config.sampler.fit) fitted = config.sampler.fit->params;
  return std::make_unique<EmpiricalSampler>(build_pools(config.sampler.records), fitted);
}

std::unique_ptr<CodeSelector> make_selector(const ScenarioConfig& config,
                                            const StrategySpec& strategy) {
  const auto& sys = config.system;
  switch (strategy.kind) {
    case StrategySpec::Kind::tofec:
      return std::make_unique<TofecSelector>(TofecSelector::for_system(sys, strategy.alpha));
    case StrategySpec::Kind::greedy:
      return std::make_unique<GreedySelector>(sys.classes);
    case StrategySpec::Kind::fixed: {
      std::vector<CodeChoice> codes = strategy.codes;
      if (codes.size() == 1) codes.assign(sys.classes.size(), codes.front());
      if (codes.size() != sys.classes.size()) {
        throw InputError("static strategy needs one code per class");
      }
      return std::make_unique<StaticSelector>(std::move(codes));
    }
    case StrategySpec::Kind::ideal: {
      if (!strategy.schedule.empty()) return std::make_unique<IdealSelector>(strategy.schedule);
      std::vector<RatePhase> phases = config.arrivals.phases;
      if (config.arrivals.kind == ArrivalProcess::Kind::poisson) {
        phases = {{config.run.horizon_ms, config.arrivals.rate_per_ms}};
      } else if (config.arrivals.kind != ArrivalProcess::Kind::phased) {
        throw InputError("ideal without a schedule needs poisson or phased arrivals");
      }
      return std::make_unique<IdealSelector>(ideal_schedule_from_phases(sys, phases));
    }
  }
  throw InputError("unknown strategy");
}

}  // namespace tofec
