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


#include <cmath>
#include <sstream>

#include "doctest.h"
#include "tofec/errors.h"
#include "tofec/traces.h"

using namespace tofec;

TEST_CASE("trace CSV parsing") {
  std::istringstream in(
      "# measured\nchunk_size_mb,delay_ms,op_type,timestamp\n1,50.5,read,3\n\n2,70,,\n");
  const auto r = read_trace_csv(in);
  REQUIRE(r.size() == 2);
  CHECK(r[0].chunk_size_mb == 1);
  CHECK(r[0].delay_ms == 50.5);
  CHECK(*r[0].op_type == "read");
  CHECK(*r[0].timestamp == 3);
  CHECK(!r[1].op_type);
  std::istringstream bad("chunk_size_mb,delay_ms\n1,-3\n");
  CHECK_THROWS_AS(read_trace_csv(bad), InputError);
  std::istringstream junk("chunk_size_mb,delay_ms\n1,abc\n");
  CHECK_THROWS_AS(read_trace_csv(junk), InputError);
  std::istringstream noheader("size,delay\n1,2\n");
  CHECK_THROWS_AS(read_trace_csv(noheader), InputError);
}

TEST_CASE("synthetic trace") {
  const DelayParams p{20, 20, 0, 0};
  const std::vector<double> one{1.0};
  const auto r = generate_synthetic_trace(p, one, 1, 3);
  REQUIRE(r.size() == 1);
  CHECK(r[0].delay_ms == 40);
  const DelayParams q{20, 20, 10, 15};
  const auto a = generate_synthetic_trace(q, one, 1000, 3);
  const auto b = generate_synthetic_trace(q, one, 1000, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].delay_ms == b[i].delay_ms);
    CHECK(a[i].delay_ms >= 40);
  }
  CHECK_THROWS_AS(generate_synthetic_trace(q, one, 0, 3), InputError);
}

TEST_CASE("fit round trip recovers the parameters") {
  const DelayParams p{20, 20, 10, 15};
  const std::vector<double> sizes{0.5, 1, 1.5, 3};
  const auto trace = generate_synthetic_trace(p, sizes, 10000, 11);
  const auto fit = fit_params(trace);
  CHECK(fit.warnings.empty());
  CHECK(fit.params.delta_base == doctest::Approx(20).epsilon(0.1));
  CHECK(fit.params.delta_slope == doctest::Approx(20).epsilon(0.1));
  CHECK(fit.params.psi_base == doctest::Approx(10).epsilon(0.1));
  CHECK(fit.params.psi_slope == doctest::Approx(15).epsilon(0.1));
  REQUIRE(fit.moments.size() == 4);
  CHECK(fit.moments[0].count == 9000);

  // Without the correction the trimmed std understates the tail.
  FitOptions raw;
  raw.correct_truncation = false;
  const auto biased = fit_params(trace, raw);
  CHECK(biased.params.psi_slope < 0.7 * 15);
}

TEST_CASE("fit edge cases") {
  std::vector<TraceRecord> flat;
  for (int i = 0; i < 20; ++i) {
    flat.push_back({1.0, 40.0, {}, {}});
    flat.push_back({2.0, 60.0, {}, {}});
  }
  const auto f = fit_params(flat);
  CHECK(f.params.psi_base == 0);
  CHECK(f.params.psi_slope == 0);
  CHECK(f.params.delta_base == doctest::Approx(20));
  CHECK(f.params.delta_slope == doctest::Approx(20));

  std::vector<TraceRecord> one_size(flat.begin(), flat.end());
  std::erase_if(one_size, [](const TraceRecord& r) { return r.chunk_size_mb == 2.0; });
  CHECK_THROWS_AS(fit_params(one_size), InputError);

  std::vector<TraceRecord> small{{1.0, 40, {}, {}}, {2.0, 60, {}, {}}};
  CHECK_THROWS_AS(fit_params(small), InputError);

  // A mean line falling with size forces a negative slope, which is clamped.
  std::vector<TraceRecord> falling;
  for (int i = 0; i < 20; ++i) {
    falling.push_back({1.0, 60.0, {}, {}});
    falling.push_back({2.0, 40.0, {}, {}});
  }
  const auto w = fit_params(falling);
  CHECK(w.params.delta_slope == 0);
  CHECK(!w.warnings.empty());
}

TEST_CASE("trimming drops the largest delays, ties in record order") {
  std::vector<TraceRecord> r;
  for (int i = 0; i < 19; ++i) r.push_back({1.0, 10.0, {}, {}});
  r.push_back({1.0, 1000.0, {}, {}});
  for (int i = 0; i < 20; ++i) r.push_back({2.0, 20.0 + (i < 2 ? 5 : 0), {}, {}});
  FitOptions o;
  o.correct_truncation = false;
  const auto f = fit_params(r, o);
  CHECK(f.moments[0].count == 18);
  CHECK(f.moments[0].mean == 10);
  CHECK(f.moments[1].mean == 20);
}

TEST_CASE("two sizes interpolate exactly") {
  const std::vector<double> x{1, 3}, y{5, 11};
  const auto [a, b] = fit_line(x, y);
  CHECK(a == doctest::Approx(2));
  CHECK(b == doctest::Approx(3));
}

TEST_CASE("pools keep the untrimmed records") {
  std::vector<TraceRecord> r{{1.0, 50, {}, {}}, {1.0, 60, {}, {}}, {1.0, 70, {}, {}},
                             {2.0, 500, {}, {}}};
  const auto pools = build_pools(r);
  CHECK(pools.at(1.0).size() == 3);
  CHECK(pools.at(2.0).size() == 1);
  CHECK_THROWS_AS(build_pools({}), InputError);
}

TEST_CASE("params file round trip") {
  const DelayParams p{55, 14, 18, 30.25};
  std::stringstream s;
  write_params(s, p);
  CHECK(read_params(s) == p);
  std::istringstream missing("delta_base_ms = 1\n");
  CHECK_THROWS_AS(read_params(missing), InputError);
}
