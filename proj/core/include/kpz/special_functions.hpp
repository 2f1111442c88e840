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

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace kpz {

//---------------------------------------------------------------------------//
// Airy function
//---------------------------------------------------------------------------//

inline constexpr double kAiryMinArgument = -40.0;
inline constexpr double kAiryMaxArgument = 200.0;

/// Ai(x) for x in [-40, 200]; DomainError outside. Underflows to 0 near the top
/// of the range.
double airy_ai(double x);

/// Ai'(x) on the same range.
double airy_ai_prime(double x);

/// Ai(0) = 3^{-2/3} / Gamma(2/3) and Ai'(0) = -3^{-1/3} / Gamma(1/3).
inline constexpr double kAiryAtZero = 0.35502805388781723926;
inline constexpr double kAiryPrimeAtZero = -0.25881940379280679840;

//---------------------------------------------------------------------------//
// Gaussian tail
//---------------------------------------------------------------------------//

/// Integral of exp(-y^2 / (4 v)) over (-inf, u]. Throws ParameterError if v <= 0.
double gaussian_tail_integral(double u, double v);

/// Standard normal CDF.
double normal_cdf(double z);

//---------------------------------------------------------------------------//
// Quadrature
//---------------------------------------------------------------------------//

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double lo = 0.0;
  double hi = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }

  template <typename F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * f(nodes[k]);
    return sum;
  }
};

/// n-point Gauss-Legendre rule on [lo, hi]. Throws ParameterError if n < 1 or lo >= hi.
QuadratureRule gauss_legendre(int n, double lo, double hi);

/// `panels` equal Gauss-Legendre panels of n points each on [lo, hi].
QuadratureRule composite_gauss_legendre(int n, int panels, double lo, double hi);

/// Composite rule whose panels are at most `max_width` wide.
QuadratureRule composite_by_width(int n, double max_width, double lo, double hi);

struct SemiInfiniteOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-15;
  double tail_bound = 1e-13;  ///< target for C exp(-Lambda / decay_scale)
  int nodes_per_panel = 16;
  double panel_width = 1.0;
  int max_doublings = 6;
};

struct IntegralEstimate {
  double value = 0.0;
  double cauchy_error = 0.0;  ///< |coarse - fine| from the last doubling
  double truncation = 0.0;    ///< upper limit used
  int panels = 0;
};

/// Integral of f over [lo, inf). The caller certifies |f(x)| <= C exp(-(x - lo) / decay_scale)
/// with C ~ max |f| near lo. The range is truncated where the envelope drops
/// below the tail bound, and composite Gauss-Legendre panels are doubled until
/// two successive estimates agree. Throws AccuracyError carrying both estimates
/// when they never do.
IntegralEstimate integrate_semiinfinite_estimate(const std::function<double(double)>& f, double lo,
                                                 double decay_scale,
                                                 const SemiInfiniteOptions& opts = {});

double integrate_semiinfinite(const std::function<double(double)>& f, double lo,
                              double decay_scale, const SemiInfiniteOptions& opts = {});

/// Integral of f over [a, upper] for every a in `points` (all <= upper), from
/// one downward cumulative sweep. Gaps are split into Gauss-Legendre panels no
/// wider than `max_width`.
std::vector<double> cumulative_upper_integrals(const std::function<double(double)>& f,
                                               std::span<const double> points, double upper,
                                               int nodes_per_panel = 20, double max_width = 0.5);

}  // namespace kpz
