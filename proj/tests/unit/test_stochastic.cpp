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
#include "kpz/lpp.hpp"
#include "kpz/parallel.hpp"
#include "kpz/stochastic.hpp"

using namespace kpz;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <typename Draw>
Moments moments(std::size_t n, Draw&& draw) {
  double s = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = draw(k);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  return {mean, (s2 - n * mean * mean) / (n - 1)};
}

// Exp(mean m): mean m, variance m^2, var of the sample variance ~ 8 m^4 / n.
void check_exponential(const Moments& mo, double m, std::size_t n) {
  CHECK(std::abs(mo.mean - m) < 4.0 * m / std::sqrt(double(n)));
  CHECK(std::abs(mo.var - m * m) < 4.0 * std::sqrt(8.0) * m * m / std::sqrt(double(n)));
}

}  // namespace

TEST_CASE("philox known answers") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
        PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniforms exclude zero and reach one") {
  CHECK(unit_open_zero(0) == 0x1.0p-53);
  CHECK(unit_open_zero(~std::uint64_t{0}) == 1.0);
  CHECK(exp_from_uniform(1.0, 3.0) == 0.0);
}

TEST_CASE("sample_exp uses the expectation convention") {
  constexpr std::size_t n = 1'000'000;
  for (double mean : {1.0, 2.0}) {
    CounterStream s({7, 0});
    check_exponential(moments(n, [&](std::size_t) { return sample_exp(s, mean); }), mean, n);
  }
  CounterStream s({7, 0});
  CHECK_THROWS_AS(sample_exp(s, 0.0), ParameterError);
  CHECK_THROWS_AS(sample_exp(s, -1.0), ParameterError);
}

TEST_CASE("sample_geom") {
  CounterStream s({11, 0});
  for (int k = 0; k < 1000; ++k) CHECK(sample_geom(s, 0.0) == 0);
  constexpr std::size_t n = 1'000'000;
  for (double q : {0.5, 0.7}) {
    CounterStream t({11, 1});
    const Moments mo = moments(n, [&](std::size_t) { return double(sample_geom(t, q)); });
    const double mean = q / (1 - q);
    const double var = q / ((1 - q) * (1 - q));
    CHECK(std::abs(mo.mean - mean) < 4.0 * std::sqrt(var / n));
  }
  CHECK_THROWS_AS(sample_geom(s, 1.0), ParameterError);
  CHECK_THROWS_AS(sample_geom(s, -0.1), ParameterError);
}

TEST_CASE("model parameter invariants") {
  const ModelParams p = ModelParams::two_sided_stationary(0.3);
  CHECK(p.a == doctest::Approx(-0.2));
  CHECK(p.b == doctest::Approx(0.2));
  CHECK(p.bottom_mean() == doctest::Approx(1.0 / 0.7));
  CHECK(p.left_mean() == doctest::Approx(1.0 / 0.3));
  CHECK(p.origin_mean() == 0.0);
  CHECK_THROWS_AS(ModelParams::shifted_plus(0.1, -0.1), ParameterError);
  CHECK_THROWS_AS(ModelParams::two_sided_stationary(1.0), ParameterError);
  const ModelParams ns = ModelParams::no_source();
  CHECK(ns.a == 0.0);
  CHECK(ns.b == 0.0);
}

TEST_CASE("weight_at boundary classes") {
  const WeightOracle none(ModelParams::no_source(), {3, 9});
  CHECK(none.weight_at(0, 5) == 0.0);
  CHECK(none.weight_at(5, 0) == 0.0);
  CHECK(none.weight_at(0, 0) == 0.0);
  CHECK_THROWS_AS(none.weight_at(-1, 0), DomainError);

  constexpr std::size_t n = 1'000'000;
  const ModelParams stat = ModelParams::two_sided_stationary(0.5);
  SUBCASE("bulk, rows and columns") {
    const WeightOracle w(stat, {5, 0});
    check_exponential(moments(n, [&](std::size_t k) { return w.weight_at(1 + k % 1000, 1 + k / 1000); }), 1.0, n);
    check_exponential(moments(n, [&](std::size_t k) { return w.weight_at(1 + k, 0); }), 2.0, n);
    check_exponential(moments(n, [&](std::size_t k) { return w.weight_at(0, 1 + k); }), 2.0, n);
    CHECK(w.weight_at(0, 0) == 0.0);
  }
  SUBCASE("shifted origin") {
    const ModelParams plus = ModelParams::shifted_plus(0.25, 0.25);
    const Moments mo = moments(n, [&](std::size_t k) { return WeightOracle(plus, {5, k}).weight_at(0, 0); });
    check_exponential(mo, 2.0, n);
    CHECK(WeightOracle(ModelParams::shifted_zero(0.25, 0.25), {5, 1}).weight_at(0, 0) == 0.0);
  }
  SUBCASE("asymmetric density") {
    const WeightOracle w(ModelParams::two_sided_stationary(0.3), {6, 0});
    check_exponential(moments(n, [&](std::size_t k) { return w.weight_at(1 + k, 0); }), 1.0 / 0.7, n);
    check_exponential(moments(n, [&](std::size_t k) { return w.weight_at(0, 1 + k); }), 1.0 / 0.3, n);
  }
}

TEST_CASE("bernoulli domain zeroes the leading border cells") {
  const ModelParams p = ModelParams::bernoulli_domain(0.3);
  double zp = 0.0;
  constexpr int n = 20000;
  for (int k = 0; k < n; ++k) {
    const WeightOracle w(p, {13, std::uint64_t(k)});
    for (std::int64_t i = 1; i <= w.zeta_plus(); ++i) REQUIRE(w.weight_at(i, 0) == 0.0);
    for (std::int64_t j = 1; j <= w.zeta_minus(); ++j) REQUIRE(w.weight_at(0, j) == 0.0);
    CHECK(w.weight_at(w.zeta_plus() + 1, 0) > 0.0);
    CHECK(w.weight_at(0, w.zeta_minus() + 1) > 0.0);
    zp += double(w.zeta_plus());
  }
  // zeta+ ~ Geom(1 - rho): mean 0.7 / 0.3.
  const double mean = 0.7 / 0.3;
  const double sd = std::sqrt(0.7) / 0.3;
  CHECK(std::abs(zp / n - mean) < 4.0 * sd / std::sqrt(double(n)));
}

TEST_CASE("weight fields are reproducible and order independent") {
  const WeightOracle a(ModelParams::two_sided_stationary(0.4), {99, 17});
  const WeightOracle b(ModelParams::two_sided_stationary(0.4), {99, 17});
  const auto fa = materialize_weights(a, 40, 30);
  CHECK(fa == materialize_weights(b, 40, 30));
  // Reverse traversal gives the same values bit for bit.
  for (std::int64_t j = 30; j >= 0; --j)
    for (std::int64_t i = 40; i >= 0; --i) REQUIRE(b.weight_at(i, j) == fa[std::size_t(j * 41 + i)]);
  std::vector<double> row(41);
  a.fill_row(7, 0, row);
  for (std::int64_t i = 0; i <= 40; ++i) CHECK(row[std::size_t(i)] == fa[std::size_t(7 * 41 + i)]);
  CHECK(materialize_weights(WeightOracle(a.params(), {99, 18}), 40, 30) != fa);
}

TEST_CASE("independence across sample index") {
  // Lag-1 correlation of per-sample G values. At 10^5 samples the null
  // standard deviation is 0.003, so the 0.01 bound sits at 3 sigma.
  constexpr std::size_t n = 100000;
  std::vector<double> g(n);
  const PointSet pts({{10, 10}});
  parallel_for(n, 0, [&](std::size_t k) {
    g[k] = last_passage(WeightOracle(ModelParams::two_sided_stationary(0.5), {2024, k}), pts).at({10, 10});
  });
  double mean = 0.0;
  for (double v : g) mean += v;
  mean /= n;
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    c0 += (g[k] - mean) * (g[k] - mean);
    if (k + 1 < n) c1 += (g[k] - mean) * (g[k + 1] - mean);
  }
  CHECK(std::abs(c1 / c0) < 0.01);
  // Cross-correlation of two streams drawn side by side.
  CounterStream s1 = stream_for(5, 1), s2 = stream_for(5, 2);
  double sxy = 0.0;
  constexpr int m = 200000;
  for (int k = 0; k < m; ++k) sxy += (s1.uniform() - 0.5) * (s2.uniform() - 0.5);
  CHECK(std::abs(sxy / m) * 12.0 < 4.0 / std::sqrt(double(m)));
}
