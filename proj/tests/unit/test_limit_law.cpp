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
#include <numbers>
#include <utility>
#include <vector>

#include "doctest.h"
#include "kpz/errors.hpp"
#include "kpz/limit_law.hpp"
#include "kpz/special_functions.hpp"

using namespace kpz;

TEST_CASE("multi-point spec validation") {
  CHECK_THROWS_AS(MultiPointSpec({0.0, 0.0}, {1.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(MultiPointSpec({1.0, 0.0}, {1.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(MultiPointSpec({0.0}, {1.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(MultiPointSpec({}, {}), ParameterError);
  CHECK_THROWS_AS(MultiPointSpec(std::vector<double>(9, 0.0), std::vector<double>(9, 0.0)), ParameterError);
  const MultiPointSpec s({-1.0, 1.0}, {0.0, 2.0});
  CHECK(s.with_s(1, 5.0).s(1) == 5.0);
  QuadratureConfig q;
  q.nodes = 8;
  CHECK_THROWS_AS(q.validate(), ParameterError);
  q = {};
  q.fd_step = 0.1;
  CHECK_THROWS_AS(q.validate(), ParameterError);
  CHECK(QuadratureConfig{}.refined().nodes == 128);
  CHECK(QuadratureConfig{}.refined().truncation == 16.0);
}

TEST_CASE("kernel reduces to the Airy kernel") {
  const MultiPointSpec s({0.0}, {0.0});
  CHECK(std::abs(khat(s, 1, 1, 0.0, 0.0) - kAiryPrimeAtZero * kAiryPrimeAtZero) < 1e-10);
  // Classical Airy kernel off the diagonal: (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y).
  const double x = 0.7, y = -0.4;
  const double classical = (airy_ai(x) * airy_ai_prime(y) - airy_ai_prime(x) * airy_ai(y)) / (x - y);
  CHECK(std::abs(khat(s, 1, 1, x, y) - classical) < 1e-10);
  CHECK_THROWS_AS(khat(s, 2, 1, 0.0, 0.0), DomainError);
  // Shift covariance of the diagonal block.
  const MultiPointSpec t({0.8}, {0.0});
  CHECK(std::abs(khat(t, 1, 1, x, y) - khat(s, 1, 1, x + 0.64, y + 0.64)) < 1e-12);
}

TEST_CASE("both representations of the lower branch agree") {
  for (auto [ti, tj] : {std::pair{1.0, 0.0}, {2.0, -1.0}, {0.5, -0.5}})
    for (double x : {-1.0, 0.0, 1.0})
      for (double y : {-1.0, 0.0, 1.0}) {
        const DualCheck d = khat_dual_check(MultiPointSpec({tj, ti}, {0, 0}), 2, 1, x, y);
        REQUIRE(d.gap <= 1e-8);
        REQUIRE(d.tail_bound < 1e-10);
      }
  const DualCheck f = airy_identity_f(1.0, 0.0, 0.0, 0.0);
  CHECK(f.gap <= 1e-8);
  CHECK_THROWS_AS(airy_identity_f(1.0, 1.0, 0.0, 0.0), ParameterError);
  CHECK_THROWS_AS(khat_dual_check(MultiPointSpec({0.0, 1.0}, {0, 0}), 1, 2, 0, 0), ParameterError);
}

TEST_CASE("tabulated terms match direct evaluation") {
  const MultiPointSpec s({-0.5, 0.5}, {0.0, 0.0});
  const Def11Terms t = def11_terms(s);
  CHECK(std::abs(t.R - def11_R(s)) < 1e-9);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t q : {std::size_t(0), std::size_t(17), std::size_t(40)}) {
      CHECK(std::abs(t.psi[k][q] - def11_psi(s, k + 1, t.nodes[k][q])) < 1e-9);
      CHECK(std::abs(t.phi[k][q] - def11_phi(s, k + 1, t.nodes[k][q])) < 1e-9);
    }
  // tau_1 = 0: R - s_1 = int_{s_1}^inf (u - s_1) Ai(u) du, and Ai(u) <= Ai(s_1)
  // exp(-sqrt(s_1) (u - s_1)) bounds it by Ai(s_1) / s_1.
  const double excess = def11_R(MultiPointSpec({0.0}, {10.0})) - 10.0;
  CHECK(excess > 0.0);
  CHECK(excess <= airy_ai(10.0) / 10.0);
}

TEST_CASE("determinant") {
  CHECK(std::abs(fredholm_det(MultiPointSpec({-1.0, 0.0, 1.0}, {10, 10, 10})) - 1.0) < 1e-6);
  // m = 1 is the GUE Tracy-Widom distribution at s + tau^2.
  CHECK(std::abs(fredholm_det(MultiPointSpec({0.0}, {0.0})) - 0.969372828355) < 1e-9);
  for (double tau : {0.5, 1.0, 1.5})
    for (double s : {-2.0, 0.5})
      CHECK(std::abs(fredholm_det(MultiPointSpec({tau}, {s})) - fredholm_det(MultiPointSpec({0.0}, {s + tau * tau}))) <
            1e-8);
  // Doubled resolution agrees.
  const MultiPointSpec m2({-1.0, 1.0}, {0.0, 0.0});
  CHECK(std::abs(fredholm_det(m2) - fredholm_det(m2, QuadratureConfig{}.refined())) < 1e-8);
}

TEST_CASE("g_m and its resolvent") {
  // Far in the upper tail g(s, s) det = s - E max(A(tau_1), A(tau_2)). The
  // stationary profile has Brownian increments of variance 2 |tau_2 - tau_1|
  // and mean-zero marginals, so E max = sqrt((tau_2 - tau_1) / pi).
  for (auto [a, b] : {std::pair{-1.0, 1.0}, {0.0, 0.5}, {-0.3, 1.7}})
    CHECK(std::abs(g_m(MultiPointSpec({a, b}, {10, 10})) - (10.0 - std::sqrt((b - a) / std::numbers::pi))) < 1e-5);
  CHECK(std::abs(g_m(MultiPointSpec({0.0}, {10})) - 10.0) < 1e-8);
  const MultiPointSpec s({0.0}, {0.0});
  CHECK(std::abs(g_m(s) - g_m(s, QuadratureConfig{}.refined())) < 1e-8);
  // At large s the resolvent part is second order in D.
  const MultiPointSpec big({0.0}, {3.0});
  const NystromSystem sys(big, {});
  const Def11Terms t = def11_terms(big);
  std::vector<double> phi(sys.size()), psi(sys.size());
  for (std::size_t q = 0; q < sys.size(); ++q) {
    phi[q] = std::sqrt(t.weights[0][q]) * t.phi[0][q];
    psi[q] = std::sqrt(t.weights[0][q]) * t.psi[0][q];
  }
  double first = 0.0, identity = 0.0;
  const std::vector<double> dphi = sys.apply(phi);
  for (std::size_t q = 0; q < sys.size(); ++q) {
    identity += psi[q] * phi[q];
    first += psi[q] * dphi[q];
  }
  const double neumann = t.R - identity - first;
  CHECK(std::abs(g_m(big) - neumann) < 1e-2 * std::abs(first));
}

TEST_CASE("invertibility guard") {
  CHECK(invertibility_guard(MultiPointSpec({-1.0, 1.0}, {5, 5})).ok);
  const GuardReport low = invertibility_guard(MultiPointSpec({-1.0, 1.0}, {-3, -3}));
  CHECK(low.ok);
  CHECK(low.det > 0.0);
  CHECK(low.det < invertibility_guard(MultiPointSpec({-1.0, 1.0}, {0, 0})).det);
  NystromSystem sys(MultiPointSpec({0.0}, {-4.0}), {});
  sys.negate_kernel();
  const GuardReport bad = invertibility_guard(sys);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.diagnostics.empty());
}

TEST_CASE("one-point law") {
  CHECK(limit_cdf(MultiPointSpec({0.0}, {-8.0})).cdf < 0.02);
  CHECK(limit_cdf(MultiPointSpec({0.0}, {8.0})).cdf > 0.999);
  double previous = -1.0;
  for (double s = -4.0; s <= 4.0; s += 0.5) {
    const double f = limit_cdf(MultiPointSpec({0.0}, {s})).cdf;
    REQUIRE(f >= previous - 1e-6);
    previous = f;
  }
  for (double tau : {0.5, 1.0, 2.0})
    for (double s : {-2.0, 0.0, 2.0})
      CHECK(std::abs(limit_cdf(MultiPointSpec({tau}, {s})).cdf - limit_cdf(MultiPointSpec({-tau}, {s})).cdf) <= 1e-6);
}

TEST_CASE("Baik-Rains moments") {
  // Mean 0 and variance 1.15039 for the tau = 0 law.
  double mean = 0.0, second = 0.0, previous = 0.0;
  const double h = 0.05;
  for (double s = -9.0; s <= 9.0 + 1e-9; s += h) {
    const double f = limit_cdf(MultiPointSpec({0.0}, {s})).cdf;
    const double mid = s - h / 2;
    mean += mid * (f - previous);
    second += mid * mid * (f - previous);
    previous = f;
  }
  CHECK(std::abs(mean) < 1e-3);
  CHECK(std::abs(second - mean * mean - 1.15039) < 3e-3);
}

TEST_CASE("two-point law") {
  const MultiPointSpec s({-1.0, 1.0}, {0.3, 8.0});
  CHECK(std::abs(limit_cdf(s).cdf - limit_cdf(MultiPointSpec({-1.0}, {0.3})).cdf) <= 1e-4);
  CHECK(std::abs(limit_cdf(MultiPointSpec({-1.0, 1.0}, {8.0, 0.3})).cdf -
                 limit_cdf(MultiPointSpec({1.0}, {0.3})).cdf) <= 1e-4);
  // Joint probability is at most either marginal.
  const double joint = limit_cdf(MultiPointSpec({-1.0, 1.0}, {0.0, 0.0})).cdf;
  CHECK(joint <= limit_cdf(MultiPointSpec({-1.0}, {0.0})).cdf + 1e-6);
  CHECK(joint >= 0.0);
  for (double s1 : {-3.0, -1.5, 0.0, 1.5, 3.0}) {
    double previous = -1.0;
    for (double s2 : {-3.0, -1.5, 0.0, 1.5, 3.0}) {
      const double f = limit_cdf(MultiPointSpec({-1.0, 1.0}, {s1, s2})).cdf;
      REQUIRE(f >= previous - 1e-6);
      previous = f;
    }
  }
}
