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
#include <limits>

#include "doctest.h"
#include "fixtures.h"
#include "tofec/errors.h"
#include "tofec/strategies.h"

using namespace tofec;
using tofec::testing::example_class;
using tofec::testing::example_system;

TEST_CASE("greedy selection") {
  const ClassSpec c = example_class();
  CHECK(greedy_select(c, 0) == CodeChoice{1, 1});
  CHECK(greedy_select(c, 3) == CodeChoice{3, 3});
  CHECK(greedy_select(c, 16) == CodeChoice{12, 6});
  for (int l = 1; l <= 20; ++l) CHECK(greedy_select(c, l).n <= l);
  GreedySelector g({c});
  CHECK(g.select({0, 0, 0, 5}) == CodeChoice{5, 5});
}

TEST_CASE("tofec selection from the backlog") {
  const SystemSpec sys = example_system();
  auto sel = TofecSelector::for_system(sys, 0.0);
  CHECK(sel.select_for_backlog(0, 0) == CodeChoice{12, 6});
  CHECK(sel.select_for_backlog(0, 100000) == CodeChoice{1, 1});
  CHECK(sel.smoothed_backlog() == 100000);

  // With alpha = 0 the code is monotone in the instantaneous backlog.
  CodeChoice prev{1000, 1000};
  for (int q = 0; q <= 200; ++q) {
    const CodeChoice c = sel.select_for_backlog(0, q);
    CHECK(c.k >= 1);
    CHECK(c.k <= 6);
    CHECK(c.n >= c.k);
    CHECK(c.n <= sys.classes[0].n_cap(c.k));
    CHECK(c.k <= prev.k);
    CHECK(c.n <= prev.n);
    prev = c;
  }
}

TEST_CASE("tofec EWMA") {
  const SystemSpec sys = example_system();
  auto sel = TofecSelector::for_system(sys);
  CHECK(sel.alpha() == 0.99);
  sel.select_for_backlog(0, 10);
  CHECK(sel.smoothed_backlog() == doctest::Approx(0.1));
  sel.select_for_backlog(0, 10);
  CHECK(sel.smoothed_backlog() == doctest::Approx(0.199));
  auto fresh = sel.clone();
  auto* t = dynamic_cast<TofecSelector*>(fresh.get());
  REQUIRE(t != nullptr);
  CHECK(t->smoothed_backlog() == 0);
  CHECK_THROWS_AS(TofecSelector::for_system(sys, 1.5), InputError);
  CHECK_THROWS_AS(sel.select_for_backlog(3, 0), InputError);
}

TEST_CASE("n is clamped to [k, floor(r_max k)]") {
  // A table whose N and K intervals disagree: N says 1, K says 3.
  ThresholdTable t;
  t.queue_n = {2.0};
  t.bound_n = {std::numeric_limits<double>::infinity(), 0.0};
  t.queue_k = {3.0, 2.0, 1.0};
  t.bound_k = {std::numeric_limits<double>::infinity(), 2.5, 1.5, 0.0};
  ClassSpec c = example_class();
  c.k_max = 3;
  TofecSelector sel({c}, {t}, 0.0);
  CHECK(sel.select_for_backlog(0, 0) == CodeChoice{3, 3});
}

TEST_CASE("static and ideal selectors") {
  StaticSelector s({{2, 1}});
  CHECK(s.select({0, 0, 50, 0}) == CodeChoice{2, 1});
  CHECK(s.name() == "static(2,1)");
  CHECK(StaticSelector({{2, 1}, {4, 2}}).name() == "static(2,1;4,2)");
  CHECK_THROWS_AS(StaticSelector({}), InputError);

  const std::vector<IdealPhase> plan{{0, 100, {{10, 5}}}, {100, 200, {{1, 1}}},
                                     {200, 300, {{10, 5}}}};
  IdealSelector ideal(plan);
  CHECK(ideal.select({0, 99.999, 0, 0}) == CodeChoice{10, 5});
  CHECK(ideal.select({0, 100, 0, 0}) == CodeChoice{1, 1});
  CHECK(ideal.select({0, 250, 0, 0}) == CodeChoice{10, 5});
  CHECK_THROWS_AS(ideal.select({0, 300, 0, 0}), InputError);
  CHECK_THROWS_AS(IdealSelector({{0, 100, {{1, 1}}}, {150, 200, {{1, 1}}}}), InputError);
  CHECK_THROWS_AS(IdealSelector({{10, 100, {{1, 1}}}}), InputError);
}

TEST_CASE("ideal schedule from phases") {
  const SystemSpec sys = example_system();
  const double cap = full_capacity(sys.classes, sys.threads);
  const auto plan = ideal_schedule_from_phases(
      sys, {{1000, 0.1 * cap}, {1000, 1.2 * cap}, {1000, 0.1 * cap}});
  REQUIRE(plan.size() == 3);
  CHECK(plan[0].codes[0].k >= 3);
  CHECK(plan[1].codes[0] == CodeChoice{1, 1});
  CHECK(plan[2].codes[0] == plan[0].codes[0]);
  CHECK(std::isinf(plan[2].end_ms));
  CHECK(plan[1].start_ms == 1000);
}
