// Copyright 2026 The kpzlab Authors
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
#include <vector>

#include "doctest.h"
#include "kpz/errors.hpp"
#include "kpz/experiments.hpp"
#include "kpz/tasep.hpp"

using namespace kpz;

TEST_CASE("stationary initial condition") {
  CHECK_THROWS_AS(init_stationary(1.0, {0, 10}, {1, 0}, 0), ParameterError);
  CHECK_THROWS_AS(init_stationary(0.0, {0, 10}, {1, 0}, 0), ParameterError);
  const TasepState s = init_stationary(0.5, {-500000, 499999}, {1, 0}, 0);
  std::int64_t occupied = 0;
  std::int64_t first = -1;
  for (std::int64_t x = -500000; x <= 499999; ++x) {
    if (!s.occupied(x)) continue;
    ++occupied;
    if (x >= 0 && first < 0) first = x;
  }
  CHECK(std::abs(double(occupied) / 1e6 - 0.5) < 0.002);
  CHECK(s.position(0) == first);
  CHECK(s.position(1) < s.position(0));
  CHECK(s.height(0) == 0);
}

TEST_CASE("free particle moves as a unit Poisson process") {
  constexpr int n = 4000;
  constexpr double t = 20.0;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    TasepState s({0}, {0, 200}, false);
    s.evolve(WaitingTimes({5, std::uint64_t(k)}), t);
    total += double(s.position(0));
  }
  CHECK(std::abs(total / n - t) < 3.0 * std::sqrt(t / n));
}

TEST_CASE("exclusion, ordering and height increments") {
  for (std::uint64_t k = 0; k < 200; ++k) {
    TasepState s = init_stationary(0.5, {-60, 60}, {9, k}, runway_for(15.0));
    const WaitingTimes omega({9, k});
    for (double t = 1.0; t <= 15.0; t += 1.0) {
      s.evolve(omega, t);
      for (std::int64_t n = s.label_lo(); n < s.label_hi(); ++n)
        REQUIRE(s.position(n + 1) < s.position(n));
      const SiteWindow w = s.window();
      for (std::int64_t j = w.lo; j < w.hi; ++j) REQUIRE(std::abs(s.height(j + 1) - s.height(j)) == 1);
      REQUIRE(s.height(0) == 2 * s.current());
    }
  }
  // Two adjacent particles: the trailing one never passes.
  for (std::uint64_t k = 0; k < 100; ++k) {
    TasepState pair({0, 1}, {0, 400}, false);
    const WaitingTimes omega({1, k});
    for (double t = 0.5; t <= 40.0; t += 0.5) {
      pair.evolve(omega, t);
      REQUIRE(pair.position(0) < pair.position(-1));
    }
  }
}

TEST_CASE("closed window refuses to lose a particle") {
  TasepState s({0}, {0, 3}, false);
  CHECK_THROWS_AS(s.evolve(WaitingTimes({2, 0}), 1e6), BoundaryError);
  CHECK_THROWS_AS(s.evolve(WaitingTimes({2, 0}), -1.0), ParameterError);
}

TEST_CASE("occupation law is stationary in time") {
  // Two well-separated sites per instance; their occupation at t = 10 is Bernoulli(rho).
  constexpr int n = 4000;
  const double rho = 0.4;
  std::vector<double> counts(2, 0.0);
  for (int k = 0; k < n; ++k) {
    TasepState s = init_stationary(rho, {-200, 200}, {21, std::uint64_t(k)}, runway_for(10.0));
    s.evolve(WaitingTimes({21, std::uint64_t(k)}), 10.0);
    for (std::int64_t site : {-40, 40}) counts[s.occupied(site) ? 1 : 0] += 1.0;
  }
  const std::vector<double> probs{1 - rho, rho};
  CHECK(chi_square_test(counts, probs).p_value > 0.01);
}

TEST_CASE("bridge between passage times, particles, queues and heights") {
  std::vector<double> grid;
  for (int k = 1; k <= 50; ++k) grid.push_back(0.8 * k);
  for (std::uint64_t k = 0; k < 300; ++k) {
    const std::int64_t x = 1 + std::int64_t(k % 20);
    const std::int64_t y = 1 + std::int64_t((k / 20) % 20);
    const BridgeReport r = lpp_bridge_check({404, k}, x, y, grid);
    INFO(r.witness);
    REQUIRE(r.ok);
    CHECK(r.checks == 50);
  }
  const std::vector<double> one{1.0};
  CHECK(lpp_bridge_check({1, 1}, 1, 1, one).ok);
  CHECK_THROWS_AS(lpp_bridge_check({1, 1}, 0, 1, one), DomainError);
}

TEST_CASE("queue view of a configuration") {
  TasepState s = init_stationary(0.5, {-80, 80}, {3, 3}, runway_for(12.0));
  const WaitingTimes omega({3, 3});
  TandemQueues q = TandemQueues::from_tasep(s);
  s.evolve(omega, 12.0);
  q.evolve(omega, 12.0);
  for (std::int64_t j = s.label_lo(); j <= s.label_hi(); ++j) CHECK(s.position(j) == q.queue_of(j) - j);
  CHECK_FALSE(queue_exit_time(q, s.label_lo(), 1'000'000).has_value());
}
