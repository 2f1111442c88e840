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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "kpz/errors.hpp"
#include "kpz/lpp.hpp"

using namespace kpz;

namespace {

const ModelParams kStationary = ModelParams::two_sided_stationary(0.5);

}  // namespace

TEST_CASE("point sets") {
  const PointSet p({{3, 1}, {0, 2}, {3, 1}});
  CHECK(p.size() == 2);
  CHECK(p.max_x() == 3);
  CHECK(p.max_y() == 2);
  CHECK_THROWS_AS(PointSet({}), ParameterError);
  CHECK_THROWS_AS(PointSet({{-1, 0}}), DomainError);
}

TEST_CASE("single row and column have one path") {
  const WeightOracle w(kStationary, {1, 2});
  double row = 0.0, col = 0.0;
  for (int i = 0; i <= 9; ++i) row += w.weight_at(i, 0);
  for (int j = 0; j <= 9; ++j) col += w.weight_at(0, j);
  const PassageResult r = last_passage(w, PointSet({{9, 0}, {0, 9}}));
  CHECK(r.at({9, 0}) == doctest::Approx(row).epsilon(1e-14));
  CHECK(r.at({0, 9}) == doctest::Approx(col).epsilon(1e-14));
  CHECK_THROWS_AS(r.at({1, 1}), DomainError);
}

TEST_CASE("point to point hand cases") {
  const WeightOracle w(kStationary, {4, 0});
  CHECK(last_passage_point_to_point(w, {2, 3}, {2, 3}) == w.weight_at(2, 3));
  CHECK(last_passage_point_to_point(w, {1, 0}, {1, 1}) == w.weight_at(1, 0) + w.weight_at(1, 1));
  CHECK_THROWS_AS(last_passage_point_to_point(w, {2, 1}, {1, 3}), DomainError);
}

TEST_CASE("dynamic programming matches path enumeration exactly") {
  // Dyadic weights make every path sum exact, so equality is bitwise.
  const double quantum = std::ldexp(1.0, -24);
  for (std::uint64_t k = 0; k < 2000; ++k) {
    const ModelParams p = k % 2 ? kStationary : ModelParams::shifted_plus(0.25, 0.1);
    const WeightOracle w(p, {31, k}, quantum);
    const std::int64_t x = std::int64_t(k % 7), y = std::int64_t((k / 7) % 6);
    REQUIRE(last_passage(w, PointSet({{x, y}})).at({x, y}) == brute_force_last_passage(w, {x, y}));
  }
  const WeightOracle w(kStationary, {1, 1});
  CHECK_THROWS_AS(brute_force_last_passage(w, {12, 11}), RefusalError);
}

TEST_CASE("two-step decomposition through the origin") {
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const WeightOracle w(kStationary, {8, k}, std::ldexp(1.0, -24));
    const LatticePoint p{std::int64_t(1 + k % 9), std::int64_t(1 + k % 5)};
    const double g = last_passage(w, PointSet({p})).at(p);
    const double q01 = last_passage_point_to_point(w, {0, 1}, p);
    const double q10 = last_passage_point_to_point(w, {1, 0}, p);
    REQUIRE(std::max(q01, q10) == g - w.weight_at(0, 0));
  }
}

TEST_CASE("monotone in each coordinate") {
  for (std::uint64_t k = 0; k < 50; ++k) {
    const WeightOracle w(ModelParams::two_sided_stationary(0.35), {17, k});
    std::vector<LatticePoint> pts;
    for (std::int64_t x = 0; x <= 12; ++x)
      for (std::int64_t y = 0; y <= 12; ++y) pts.push_back({x, y});
    const PassageResult r = last_passage(w, PointSet(pts));
    for (std::int64_t x = 0; x <= 12; ++x)
      for (std::int64_t y = 0; y <= 12; ++y) {
        if (x > 0) REQUIRE(r.at({x, y}) >= r.at({x - 1, y}));
        if (y > 0) REQUIRE(r.at({x, y}) >= r.at({x, y - 1}));
      }
  }
}

TEST_CASE("stationary mean is exact") {
  // E G(x, y) = x / (1 - rho) + y / rho for the two-sided stationary model.
  const double rho = 0.4;
  const LatticePoint p{30, 20};
  constexpr int n = 20000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double g = last_passage(WeightOracle(ModelParams::two_sided_stationary(rho), {77, std::uint64_t(k)}),
                                  PointSet({p}))
                         .at(p);
    s += g;
    s2 += g * g;
  }
  const double mean = s / n;
  const double sd = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - (30 / (1 - rho) + 20 / rho)) < 4 * sd);
}
