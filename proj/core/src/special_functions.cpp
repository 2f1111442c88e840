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

#include "kpz/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "kpz/errors.hpp"

namespace kpz {

namespace {

// Ai is evaluated by three methods:
//   x >= 8        exponentially small asymptotic series
//   x <= -8       oscillatory asymptotic series
//   -8 < x < 8    Taylor expansion about the nearest anchor of a 0.25-spaced
//                 table built by integrating Ai'' = x Ai.
// A Maclaurin series does not reach 1e-10 relative accuracy much beyond
// |x| = 4 because of cancellation, and the asymptotic series is not accurate
// enough below |x| = 8, so the anchor table bridges the gap.
constexpr double kAsymptoticCut = 8.0;
constexpr double kAnchorSpacing = 0.25;
constexpr int kAnchorCount = 65;  // -8, -7.75, ..., 8

struct AiPair {
  double ai;
  double aip;
};

// u_k and v_k of the standard asymptotic expansion (DLMF 9.7.2).
struct AsymptoticCoefficients {
  static constexpr int kTerms = 40;
  std::array<double, kTerms> u{};
  std::array<double, kTerms> v{};

  AsymptoticCoefficients() {
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 1; k < kTerms; ++k) {
      const double kk = k;
      u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216 * kk);
      v[k] = -u[k] * (6 * kk + 1) / (6 * kk - 1);
    }
  }
};

const AsymptoticCoefficients& asym() {
  static const AsymptoticCoefficients c;
  return c;
}

// Sum of (-1)^k c_k / zeta^k, stopped at the smallest term.
double alternating_series(const std::array<double, AsymptoticCoefficients::kTerms>& c,
                          double zeta) {
  double sum = 0.0;
  double power = 1.0;
  double last = INFINITY;
  for (int k = 0; k < AsymptoticCoefficients::kTerms; ++k) {
    const double term = c[k] * power;
    if (std::abs(term) > last) break;
    sum += (k % 2 == 0) ? term : -term;
    last = std::abs(term);
    if (last < 1e-17 * std::abs(sum)) break;
    power /= zeta;
  }
  return sum;
}

AiPair asymptotic_positive(double x) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double e = std::exp(-zeta);
  if (e == 0.0) return {0.0, 0.0};
  const double q = std::sqrt(std::sqrt(x));
  const double pre = e / (2.0 * std::sqrt(std::numbers::pi));
  return {pre / q * alternating_series(asym().u, zeta),
          -pre * q * alternating_series(asym().v, zeta)};
}

// Splits sum_k c_k (-1)^? / zeta^k into the even and odd parts used by the
// oscillatory expansion: even = sum (-1)^k c_{2k} / zeta^{2k},
// odd = sum (-1)^k c_{2k+1} / zeta^{2k+1}.
void oscillatory_parts(const std::array<double, AsymptoticCoefficients::kTerms>& c, double zeta,
                       double& even, double& odd) {
  even = 0.0;
  odd = 0.0;
  double power = 1.0;
  double last = INFINITY;
  for (int k = 0; k < AsymptoticCoefficients::kTerms; ++k) {
    const double term = c[k] * power;
    if (std::abs(term) > last) break;
    last = std::abs(term);
    const int m = k / 2;
    const double signed_term = (m % 2 == 0) ? term : -term;
    if (k % 2 == 0)
      even += signed_term;
    else
      odd += signed_term;
    if (last < 1e-18) break;
    power /= zeta;
  }
}

AiPair asymptotic_negative(double x) {
  const double z = -x;
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  const double q = std::sqrt(std::sqrt(z));
  const double phase = zeta - std::numbers::pi / 4.0;
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  double ue, uo, ve, vo;
  oscillatory_parts(asym().u, zeta, ue, uo);
  oscillatory_parts(asym().v, zeta, ve, vo);
  const double rpi = 1.0 / std::sqrt(std::numbers::pi);
  return {rpi / q * (c * ue + s * uo), rpi * q * (s * ve - c * vo)};
}

// One Taylor step of Ai'' = x Ai from x0 by h, with coefficients from
// (k + 2)(k + 1) c_{k+2} = x0 c_k + c_{k-1}.
AiPair taylor_step(double x0, AiPair y, double h) {
  constexpr int kMax = 160;
  std::array<double, kMax> c{};
  c[0] = y.ai;
  c[1] = y.aip;
  double value = c[0] + c[1] * h;
  double deriv = c[1];
  double hpow = h;  // h^{k-1} when adding term k
  const double scale = std::abs(y.ai) + std::abs(y.aip);
  int quiet = 0;
  for (int k = 2; k < kMax; ++k) {
    const double cm3 = k >= 3 ? c[k - 3] : 0.0;
    c[k] = (x0 * c[k - 2] + cm3) / (k * (k - 1.0));
    const double d_term = k * c[k] * hpow;
    hpow *= h;
    const double v_term = c[k] * hpow;
    value += v_term;
    deriv += d_term;
    if (std::abs(v_term) + std::abs(d_term) < 1e-19 * scale) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
  }
  return {value, deriv};
}

struct AnchorTable {
  std::array<AiPair, kAnchorCount> at{};

  AnchorTable() {
    const int zero = kAnchorCount / 2;
    // x >= 0: Ai is dominant when integrating toward smaller x, so start from
    // the asymptotic value at the top and step down.
    at[kAnchorCount - 1] = asymptotic_positive(kAsymptoticCut);
    for (int k = kAnchorCount - 1; k > zero; --k)
      at[k - 1] = taylor_step(anchor_x(k), at[k], -kAnchorSpacing);
    // x < 0: oscillatory and neutrally stable; start from the exact values at 0.
    at[zero] = {kAiryAtZero, kAiryPrimeAtZero};
    for (int k = zero; k > 0; --k) at[k - 1] = taylor_step(anchor_x(k), at[k], -kAnchorSpacing);
  }

  static double anchor_x(int k) { return -kAsymptoticCut + kAnchorSpacing * k; }
};

const AnchorTable& anchors() {
  static const AnchorTable t;
  return t;
}

AiPair airy_pair(double x) {
  if (!(x >= kAiryMinArgument && x <= kAiryMaxArgument))
    throw DomainError("airy: argument " + std::to_string(x) + " outside [-40, 200]");
  if (x >= kAsymptoticCut) return asymptotic_positive(x);
  if (x <= -kAsymptoticCut) return asymptotic_negative(x);
  const int k = static_cast<int>(std::lround((x + kAsymptoticCut) / kAnchorSpacing));
  const double x0 = AnchorTable::anchor_x(k);
  return taylor_step(x0, anchors().at[k], x - x0);
}

//---------------------------------------------------------------------------//

// Legendre P_n and its derivative at x.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = n == 0 ? 1.0 : p1;
  dp = n == 0 ? 0.0 : n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

double airy_ai(double x) { return airy_pair(x).ai; }

double airy_ai_prime(double x) { return airy_pair(x).aip; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double gaussian_tail_integral(double u, double v) {
  if (!(v > 0.0)) throw ParameterError("gaussian_tail_integral: v must be positive");
  return std::sqrt(4.0 * std::numbers::pi * v) * 0.5 * std::erfc(-u / (2.0 * std::sqrt(v)));
}

QuadratureRule gauss_legendre(int n, double lo, double hi) {
  if (n < 1) throw ParameterError("gauss_legendre: n must be at least 1");
  if (!(lo < hi)) throw ParameterError("gauss_legendre: empty interval");
  QuadratureRule rule;
  rule.lo = lo;
  rule.hi = hi;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo_idx = static_cast<std::size_t>(i);
    const auto hi_idx = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo_idx] = mid - half * x;
    rule.nodes[hi_idx] = mid + half * x;
    rule.weights[lo_idx] = half * w;
    rule.weights[hi_idx] = half * w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = mid;
  return rule;
}

QuadratureRule composite_gauss_legendre(int n, int panels, double lo, double hi) {
  if (panels < 1) throw ParameterError("composite_gauss_legendre: panels must be at least 1");
  const QuadratureRule unit = gauss_legendre(n, -1.0, 1.0);
  QuadratureRule rule;
  rule.lo = lo;
  rule.hi = hi;
  rule.nodes.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(panels));
  rule.weights.reserve(rule.nodes.capacity());
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    const double mid = a + 0.5 * width;
    for (std::size_t k = 0; k < unit.size(); ++k) {
      rule.nodes.push_back(mid + 0.5 * width * unit.nodes[k]);
      rule.weights.push_back(0.5 * width * unit.weights[k]);
    }
  }
  return rule;
}

QuadratureRule composite_by_width(int n, double max_width, double lo, double hi) {
  if (!(max_width > 0.0)) throw ParameterError("composite_by_width: width must be positive");
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width - 1e-12)));
  return composite_gauss_legendre(n, panels, lo, hi);
}

IntegralEstimate integrate_semiinfinite_estimate(const std::function<double(double)>& f,
                                                 double lo, double decay_scale,
                                                 const SemiInfiniteOptions& opts) {
  if (!(decay_scale > 0.0)) throw ParameterError("integrate_semiinfinite: decay scale must be positive");
  const double length = decay_scale * std::log(1.0 / opts.tail_bound);
  const double hi = lo + length;
  int panels = std::max(1, static_cast<int>(std::ceil(length / opts.panel_width)));
  auto estimate = [&](int p) {
    return composite_gauss_legendre(opts.nodes_per_panel, p, lo, hi).integrate(f);
  };
  double coarse = estimate(panels);
  for (int d = 0; d <= opts.max_doublings; ++d) {
    panels *= 2;
    const double fine = estimate(panels);
    const double err = std::abs(fine - coarse);
    if (err <= std::max(opts.rel_tol * std::abs(fine), opts.abs_tol))
      return {fine, err, hi, panels};
    if (d == opts.max_doublings)
      throw AccuracyError("integrate_semiinfinite: panel doubling did not converge", coarse, fine);
    coarse = fine;
  }
  return {coarse, 0.0, hi, panels};  // unreachable
}

double integrate_semiinfinite(const std::function<double(double)>& f, double lo,
                              double decay_scale, const SemiInfiniteOptions& opts) {
  return integrate_semiinfinite_estimate(f, lo, decay_scale, opts).value;
}

std::vector<double> cumulative_upper_integrals(const std::function<double(double)>& f,
                                               std::span<const double> points, double upper,
                                               int nodes_per_panel, double max_width) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return points[l] > points[r]; });
  std::vector<double> out(points.size());
  double acc = 0.0;
  double top = upper;
  for (std::size_t idx : order) {
    const double a = points[idx];
    if (a > upper) throw DomainError("cumulative_upper_integrals: point above the upper limit");
    if (a < top) acc += composite_by_width(nodes_per_panel, max_width, a, top).integrate(f);
    top = std::min(top, a);
    out[idx] = acc;
  }
  return out;
}

}  // namespace kpz
