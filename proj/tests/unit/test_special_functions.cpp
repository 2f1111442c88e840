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

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kpz/errors.hpp"
#include "kpz/special_functions.hpp"

using namespace kpz;

namespace {

// |Ai| envelope for x < 0, where relative error is meaningless near zeros.
double envelope(double x) { return x < 0 ? std::pow(-x, -0.25) / std::sqrt(std::numbers::pi) : 1.0; }

}  // namespace

TEST_CASE("Ai at the origin") {
  const double exact = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
  CHECK(std::abs(airy_ai(0.0) - exact) < 1e-10);
  CHECK(std::abs(airy_ai(0.0) - 0.355028053887817) < 1e-14);
  CHECK(std::abs(airy_ai_prime(0.0) - kAiryPrimeAtZero) < 1e-14);
}

TEST_CASE("Ai against an independent implementation") {
  double worst = 0.0;
  for (double x = -40.0; x <= 30.0; x += 0.0173) {
    const double ref = boost::math::airy_ai(x);
    const double scale = x < 0 ? envelope(x) : std::abs(ref);
    worst = std::max(worst, std::abs(airy_ai(x) - ref) / scale);
  }
  CHECK(worst < 1e-10);
  double worst_prime = 0.0;
  for (double x = -20.0; x <= 20.0; x += 0.0191) {
    const double ref = boost::math::airy_ai_prime(x);
    const double scale = x < 0 ? envelope(x) * std::pow(-x, 0.5) + 1e-3 : std::abs(ref);
    worst_prime = std::max(worst_prime, std::abs(airy_ai_prime(x) - ref) / scale);
  }
  CHECK(worst_prime < 1e-9);
}

TEST_CASE("Ai decay, first zero and range") {
  double previous = airy_ai(0.0);
  for (double x = 0.25; x <= 12.0; x += 0.25) {
    const double v = airy_ai(x);
    REQUIRE(v < previous);
    REQUIRE(v > 0.0);
    previous = v;
  }
  CHECK(airy_ai(10.0) < 1.2e-10);
  CHECK(airy_ai(10.0) <= std::exp(-2.0 / 3.0 * std::pow(10.0, 1.5)));
  CHECK(airy_ai(200.0) >= 0.0);
  // Bisection bracket around the first zero.
  double lo = -2.4, hi = -2.3;
  REQUIRE(airy_ai(lo) * airy_ai(hi) < 0);
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    (airy_ai(mid) * airy_ai(lo) > 0 ? lo : hi) = mid;
  }
  CHECK(std::abs(lo - (-2.338107410459767)) < 1e-12);
  CHECK_THROWS_AS(airy_ai(-40.5), DomainError);
  CHECK_THROWS_AS(airy_ai(200.5), DomainError);
}

TEST_CASE("Airy equation residual") {
  const double h = 1e-3;
  double worst = 0.0;
  for (double x = -10.0; x <= 10.0; x += 0.05) {
    const double d2 = (-airy_ai(x + 2 * h) + 16 * airy_ai(x + h) - 30 * airy_ai(x) + 16 * airy_ai(x - h) -
                       airy_ai(x - 2 * h)) /
                      (12 * h * h);
    worst = std::max(worst, std::abs(d2 - x * airy_ai(x)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("continuity across the evaluation regimes") {
  for (double x : {-8.0, -4.5, 4.5, 8.0}) {
    const double a = airy_ai(std::nextafter(x, -INFINITY)), b = airy_ai(std::nextafter(x, INFINITY));
    CHECK(std::abs(a - b) < 1e-11 * std::max(envelope(x), std::abs(airy_ai(x))));
  }
}

TEST_CASE("Gaussian tail integral") {
  for (double v : {0.3, 1.0, 4.0}) {
    CHECK(gaussian_tail_integral(0.0, v) == doctest::Approx(std::sqrt(4 * std::numbers::pi * v) / 2).epsilon(1e-14));
    CHECK(gaussian_tail_integral(60.0, v) == doctest::Approx(std::sqrt(4 * std::numbers::pi * v)).epsilon(1e-14));
  }
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double y) { return std::exp(-y * y / 4.0); }, -INFINITY, 1.0, 15, 1e-14);
  CHECK(std::abs(gaussian_tail_integral(1.0, 1.0) - oracle) < 1e-12);
  CHECK(std::abs(gaussian_tail_integral(1.0, 1.0) - 2.6950158637311006) < 1e-12);
  CHECK_THROWS_AS(gaussian_tail_integral(1.0, 0.0), ParameterError);
  CHECK(normal_cdf(0.0) == 0.5);
}

TEST_CASE("Gauss-Legendre rules") {
  for (int n : {1, 4, 16, 64}) {
    const QuadratureRule r = gauss_legendre(n, -1.5, 2.5);
    double w = 0.0;
    for (double x : r.weights) {
      REQUIRE(x > 0.0);
      w += x;
    }
    CHECK(std::abs(w - 4.0) < 1e-13 * 4.0);
    // Exact for degree 2n - 1.
    const int d = 2 * n - 1;
    const double exact = (std::pow(2.5, d + 1) - std::pow(-1.5, d + 1)) / (d + 1);
    CHECK(std::abs(r.integrate([d](double x) { return std::pow(x, d); }) - exact) < 1e-12 * std::abs(exact) + 1e-12);
  }
  // Spectral convergence on an analytic integrand.
  const auto f = [](double x) { return std::exp(x) * std::cos(3 * x); };
  const double exact = (std::exp(1.0) * (std::cos(3.0) + 3 * std::sin(3.0)) -
                        std::exp(-1.0) * (std::cos(3.0) - 3 * std::sin(3.0))) / 10.0;
  const double e4 = std::abs(gauss_legendre(4, -1, 1).integrate(f) - exact);
  const double e8 = std::abs(gauss_legendre(8, -1, 1).integrate(f) - exact);
  CHECK(e4 / e8 > 1e3);
  CHECK_THROWS_AS(gauss_legendre(0, 0, 1), ParameterError);
  CHECK_THROWS_AS(gauss_legendre(4, 1, 1), ParameterError);
  const QuadratureRule c = composite_gauss_legendre(8, 5, 0, 10);
  CHECK(c.size() == 40);
  CHECK(c.integrate([](double x) { return x * x; }) == doctest::Approx(1000.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("semi-infinite integrals") {
  CHECK(std::abs(integrate_semiinfinite([](double x) { return std::exp(-x); }, 0.0, 1.0) - 1.0) < 1e-12);
  CHECK(std::abs(integrate_semiinfinite(airy_ai, 0.0, 1.0) - 1.0 / 3.0) < 1e-10);
  const double sq = integrate_semiinfinite([](double x) { return airy_ai(x) * airy_ai(x); }, 0.0, 0.5);
  CHECK(std::abs(sq - kAiryPrimeAtZero * kAiryPrimeAtZero) < 1e-10);
  // Oracle: Boost's quadrature over Boost's Ai.
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double x) { return boost::math::airy_ai(x); }, 0.0, 60.0, 15, 1e-14);
  CHECK(std::abs(oracle - 1.0 / 3.0) < 1e-12);
  // A certificate that lies about the decay makes the Cauchy check fail.
  SemiInfiniteOptions strict;
  strict.max_doublings = 0;
  CHECK_THROWS_AS(integrate_semiinfinite_estimate([](double x) { return std::sin(40 * x) * std::exp(-x); }, 0.0,
                                                  1.0, strict),
                  AccuracyError);
}

TEST_CASE("cumulative upper integrals") {
  const std::vector<double> pts{-2.0, 0.0, 1.0, 3.0};
  const auto v = cumulative_upper_integrals([](double x) { return std::exp(-x * x); }, pts, 8.0);
  for (std::size_t k = 0; k < pts.size(); ++k)
    CHECK(std::abs(v[k] - std::sqrt(std::numbers::pi) / 2 * std::erfc(pts[k])) < 1e-12);
}
