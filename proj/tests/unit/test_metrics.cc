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


#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.h"
#include "tofec/errors.h"
#include "tofec/metrics.h"

using namespace tofec;
using tofec::testing::example_system;

namespace {

RequestRecord done(double arrival, double dispatch, double completion, CodeChoice code = {1, 1}) {
  RequestRecord r;
  r.arrival_ms = arrival;
  r.dispatch_ms = dispatch;
  r.completion_ms = completion;
  r.code = code;
  r.post_warmup = true;
  return r;
}

}  // namespace

TEST_CASE("nearest-rank percentiles") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  CHECK(nearest_rank(v, 90) == 90);
  CHECK(nearest_rank(v, 50) == 50);
  CHECK(nearest_rank(v, 99) == 99);
  CHECK(nearest_rank(v, 100) == 100);
  CHECK(nearest_rank(v, 0.5) == 1);
}

TEST_CASE("summary of a single request") {
  SimResult r;
  r.requests = {done(0, 0, 80)};
  r.end_ms = 1000;
  const auto s = summarize(r);
  CHECK(s.count == 1);
  CHECK(s.mean == 80);
  CHECK(s.median == 80);
  CHECK(s.p99 == 80);
  CHECK(s.stddev == 0);
  CHECK(s.throughput == doctest::Approx(1.0 / 1000));
  SimResult empty;
  CHECK_THROWS_AS(summarize(empty), InputError);
}

TEST_CASE("summary properties") {
  std::vector<double> d;
  std::mt19937_64 g(1);
  std::exponential_distribution<double> e(0.01);
  for (int i = 0; i < 1000; ++i) d.push_back(e(g));
  const auto a = summarize_delays(d, 1000);
  CHECK(a.median <= a.p90);
  CHECK(a.p90 <= a.p99);
  CHECK(a.p99 <= a.max);
  std::shuffle(d.begin(), d.end(), g);
  const auto b = summarize_delays(d, 1000);
  CHECK(a.mean == doctest::Approx(b.mean));
  CHECK(a.p90 == b.p90);
  CHECK(a.stddev == doctest::Approx(b.stddev));
  const auto c = summarize_delays({1, 3}, 1);
  CHECK(c.stddev == 1);  // population, not sample
}

TEST_CASE("warmup and unfinished requests are excluded") {
  SimResult r;
  r.requests = {done(0, 0, 10), done(5, 5, 25), done(6, 6, -1)};
  r.requests[0].post_warmup = false;
  r.requests[2].completion_ms = -1;
  r.end_ms = 100;
  r.warmup_ms = 5;
  const auto s = summarize(r);
  CHECK(s.count == 1);
  CHECK(s.mean == 20);
}

TEST_CASE("composition") {
  SimResult r;
  r.requests = {done(0, 0, 1, {1, 1}), done(0, 0, 1, {4, 2}), done(0, 0, 1, {4, 2}),
                done(0, 0, 1, {12, 6})};
  const auto c = composition(r, 6, 12);
  REQUIRE(c.k_fraction.size() == 6);
  CHECK(c.k_fraction[0] == 0.25);
  CHECK(c.k_fraction[1] == 0.5);
  CHECK(c.k_fraction[5] == 0.25);
  CHECK(std::accumulate(c.k_fraction.begin(), c.k_fraction.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.n_fraction[3] == 0.5);

  StaticSelector sel({{1, 1}});
  ParametricSampler s;
  RunOptions o;
  o.horizon_ms = 20000;
  const auto run_result = run(example_system(), ArrivalProcess::poisson(0.05), s, sel, o);
  CHECK(composition(run_result, 6).k_fraction[0] == 1.0);
}

TEST_CASE("time series buckets") {
  SimResult r;
  r.requests = {done(1, 1, 11, {2, 1}), done(2, 2, 32, {4, 2}), done(25, 25, 30, {6, 3})};
  r.end_ms = 30;
  const auto ts = time_series(r, 10);
  REQUIRE(ts.size() == 3);
  CHECK(ts[0].arrivals == 2);
  CHECK(*ts[0].mean_delay == 20);
  CHECK(*ts[0].mean_k == 1.5);
  CHECK(ts[1].arrivals == 0);
  CHECK(!ts[1].mean_delay);
  CHECK(!ts[1].mean_k);
  CHECK(*ts[2].mean_k == 3);
  CHECK_THROWS_AS(time_series(r, 0), InputError);
}

TEST_CASE("csv writers") {
  std::ostringstream out;
  write_summary_header(out, 2);
  SummaryRow row;
  row.scenario = "s";
  row.strategy = "static(2,1)";
  row.lambda_per_ms = 0.01;
  row.delays = summarize_delays({10, 20}, 100);
  row.k_fraction = {1.0, 0.0};
  write_summary_row(out, row, 2);
  row.overloaded = true;
  write_summary_row(out, row, 2);
  const std::string s = out.str();
  CHECK(s.find("scenario,strategy,lambda_per_ms,overloaded,count,mean,median,p90,p99,std,"
               "throughput_per_ms,k1,k2\n") == 0);
  CHECK(s.find("s,\"static(2,1)\",0.01,0,2,15,") != std::string::npos);
  CHECK(s.find("s,\"static(2,1)\",0.01,1,,,,,,,,1,0") != std::string::npos);

  SimResult r;
  r.requests = {done(1, 2, 5, {2, 1})};
  r.requests[0].usage = 6;
  std::ostringstream req;
  write_requests_csv(req, r);
  CHECK(req.str() == "id,class,T_A,T_1,X_k,n,k,D_q,D_s,usage\n0,0,1,2,5,2,1,1,3,6\n");
}
