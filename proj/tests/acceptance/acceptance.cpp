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

// Acceptance suite. Prints one PASS/FAIL line per criterion with the measured
// statistic, the pinned tolerance and the runtime budget.
//
// Usage: kpz_acceptance [criterion numbers...]   (default: all)
//
// A criterion whose only failing part is a documented deviation (analysis in
// the decisions ledger) is still reported as FAIL; only the process exit
// status ignores it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "kpz/experiments.hpp"
#include "kpz/limit_law.hpp"
#include "kpz/lpp.hpp"
#include "kpz/parallel.hpp"
#include "kpz/special_functions.hpp"
#include "kpz/tasep.hpp"

using namespace kpz;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool documented = false;  ///< every failing part is a documented deviation
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string report_line(const ValidationReport& r) {
  return r.name + ": " + r.statistic_name + "=" + num(r.statistic) + " (" + r.relation + " " + num(r.threshold) +
         ")";
}

//---------------------------------------------------------------------------//

Outcome bridge() {
  constexpr std::size_t instances = 10000;
  std::vector<std::string> witness(instances);
  std::vector<std::int64_t> checks(instances, 0);
  parallel_for(instances, 0, [&](std::size_t k) {
    const std::int64_t x = 1 + std::int64_t(k % 20);
    const std::int64_t y = 1 + std::int64_t((k / 20) % 20);
    // 50 times spanning both outcomes of L(x, y) <= t.
    const double horizon = 2.5 * double(x + y) + 5.0;
    std::vector<double> grid(50);
    for (int i = 0; i < 50; ++i) grid[std::size_t(i)] = horizon * (i + 1) / 50.0;
    const BridgeReport r = lpp_bridge_check({20260101, k}, x, y, grid);
    checks[k] = r.checks;
    if (!r.ok) witness[k] = r.witness;
  });
  std::size_t violations = 0;
  std::string first;
  std::int64_t total = 0;
  for (std::size_t k = 0; k < instances; ++k) {
    total += checks[k];
    if (!witness[k].empty()) {
      ++violations;
      if (first.empty()) first = witness[k];
    }
  }
  return {violations == 0, "violations=" + std::to_string(violations) + " (== 0) over " +
                               std::to_string(instances) + " instances, " + std::to_string(total) +
                               " checks" + (first.empty() ? "" : "; first: " + first)};
}

Outcome dp_vs_enumeration() {
  constexpr std::size_t grids = 10000;
  std::vector<std::uint8_t> bad(grids, 0);
  parallel_for(grids, 0, [&](std::size_t k) {
    const ModelParams p = k % 3 == 0   ? ModelParams::two_sided_stationary(0.3 + 0.4 * double(k % 7) / 6.0)
                          : k % 3 == 1 ? ModelParams::shifted_plus(0.2, 0.1)
                                       : ModelParams::bernoulli_domain(0.5);
    const WeightOracle w(p, {777, k});
    const std::int64_t x = std::int64_t(k % 13);
    const std::int64_t y = std::int64_t((k / 13) % (13 - x));
    const double dp = last_passage(w, PointSet({{x, y}})).at({x, y});
    bad[k] = dp != brute_force_last_passage(w, {x, y});
  });
  const auto mismatches = std::count(bad.begin(), bad.end(), 1);
  return {mismatches == 0,
          "bitwise mismatches=" + std::to_string(mismatches) + " (== 0) over " + std::to_string(grids) + " grids"};
}

Outcome airy_layer() {
  const double exact = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
  const double e0 = std::abs(airy_ai(0.0) - exact);
  double residual = 0.0;
  const double h = 1e-3;
  for (double x = -10.0; x <= 10.0 + 1e-12; x += 0.01) {
    const double d2 = (-airy_ai(x + 2 * h) + 16 * airy_ai(x + h) - 30 * airy_ai(x) + 16 * airy_ai(x - h) -
                       airy_ai(x - 2 * h)) /
                      (12 * h * h);
    residual = std::max(residual, std::abs(d2 - x * airy_ai(x)));
  }
  const double integral = std::abs(integrate_semiinfinite(airy_ai, 0.0, 1.0) - 1.0 / 3.0);
  return {e0 <= 1e-10 && residual <= 1e-8 && integral <= 1e-10,
          "|Ai(0)-3^{-2/3}/G(2/3)|=" + num(e0) + " (<= 1e-10), ODE residual=" + num(residual) +
              " (<= 1e-8), |int Ai - 1/3|=" + num(integral) + " (<= 1e-10)"};
}

Outcome kernel_dual() {
  double worst = 0.0;
  int cases = 0;
  for (auto [ti, tj] : {std::pair{1.0, 0.0}, {2.0, -1.0}, {0.5, -0.5}})
    for (double x : {-1.0, 0.0, 1.0})
      for (double y : {-1.0, 0.0, 1.0}) {
        worst = std::max(worst, khat_dual_check(MultiPointSpec({tj, ti}, {0, 0}), 2, 1, x, y).gap);
        ++cases;
      }
  return {worst <= 1e-8, "max gap=" + num(worst) + " (<= 1e-8) over " + std::to_string(cases) + " points"};
}

// Values shared by criteria 5 and 6.
struct LimitCase {
  std::vector<double> taus;
  std::vector<double> s;
};

std::vector<LimitCase> reported_cases() {
  std::vector<LimitCase> c;
  for (double s = -8.0; s <= 8.0; s += 1.0) c.push_back({{0.0}, {s}});
  for (double tau : {0.5, 1.0, 2.0})
    for (double s : {-2.0, 0.0, 2.0}) {
      c.push_back({{tau}, {s}});
      c.push_back({{-tau}, {s}});
    }
  for (double s : {-1.0, 0.3, 1.0}) {
    c.push_back({{-1.0, 1.0}, {s, 8.0}});
    c.push_back({{-1.0}, {s}});
  }
  for (const auto& p : default_joint_points()) c.push_back({{-1.0, 1.0}, p});
  return c;
}

Outcome limit_structure() {
  const QuadratureConfig quad;
  // Shift covariance of the determinant.
  double shift = 0.0;
  for (double tau : {0.5, 1.0, 1.5, 2.0})
    for (double s : {-3.0, -1.0, 0.0, 1.0})
      shift = std::max(shift, std::abs(fredholm_det(MultiPointSpec({tau}, {s}), quad) -
                                       fredholm_det(MultiPointSpec({0.0}, {s + tau * tau}), quad)));
  // Symmetry.
  double symmetry = 0.0;
  for (double tau : {0.5, 1.0, 2.0})
    for (double s : {-2.0, 0.0, 2.0})
      symmetry = std::max(symmetry, std::abs(limit_cdf(MultiPointSpec({tau}, {s}), quad).cdf -
                                             limit_cdf(MultiPointSpec({-tau}, {s}), quad).cdf));
  // Monotonicity and tails.
  double min_det = INFINITY;
  double drop = 0.0;
  double previous = -INFINITY;
  for (double s = -8.0; s <= 8.0 + 1e-9; s += 0.25) {
    const LimitLawResult r = limit_cdf(MultiPointSpec({0.0}, {s}), quad);
    if (previous > -INFINITY) drop = std::max(drop, previous - r.cdf);
    previous = r.cdf;
    min_det = std::min(min_det, r.det);
  }
  const double f_lo = limit_cdf(MultiPointSpec({0.0}, {-8.0}), quad).cdf;
  const double f_hi = limit_cdf(MultiPointSpec({0.0}, {8.0}), quad).cdf;
  // Two-point monotonicity, marginalization and determinant sign.
  for (double s1 : {-3.0, -1.5, 0.0, 1.5, 3.0}) {
    double prev2 = -INFINITY;
    for (double s2 : {-3.0, -1.5, 0.0, 1.5, 3.0}) {
      const LimitLawResult r = limit_cdf(MultiPointSpec({-1.0, 1.0}, {s1, s2}), quad);
      if (prev2 > -INFINITY) drop = std::max(drop, prev2 - r.cdf);
      prev2 = r.cdf;
      min_det = std::min(min_det, r.det);
    }
  }
  double marginal = 0.0;
  for (auto [taus, s1] : {std::pair{std::vector<double>{-1.0, 1.0}, -1.0}, {{-1.0, 1.0}, 0.3}, {{0.0, 0.5}, 0.3},
                          {{-0.5, 2.0}, 1.0}}) {
    const LimitLawResult r = limit_cdf(MultiPointSpec(taus, {s1, 8.0}), quad);
    min_det = std::min(min_det, r.det);
    marginal = std::max(marginal, std::abs(r.cdf - limit_cdf(MultiPointSpec({taus[0]}, {s1}), quad).cdf));
  }
  const bool ok = shift <= 1e-8 && symmetry <= 1e-6 && drop <= 1e-6 && f_lo < 0.02 && f_hi > 0.999 &&
                  marginal <= 1e-4 && min_det > 0.0;
  return {ok, "det shift=" + num(shift) + " (<= 1e-8), symmetry=" + num(symmetry) + " (<= 1e-6), max drop=" +
                  num(drop) + " (<= 1e-6), F(-8)=" + num(f_lo) + " (< 0.02), F(8)=" + num(f_hi) +
                  " (> 0.999), marginal gap=" + num(marginal) + " (<= 1e-4), min det=" + num(min_det) + " (> 0)"};
}

Outcome quadrature_convergence() {
  const QuadratureConfig base;
  const QuadratureConfig fine = base.refined();
  const auto cases = reported_cases();
  std::vector<double> gap(cases.size());
  parallel_for(cases.size(), 0, [&](std::size_t k) {
    const MultiPointSpec spec(cases[k].taus, cases[k].s);
    const LimitLawResult a = limit_cdf(spec, base), b = limit_cdf(spec, fine);
    gap[k] = std::max({std::abs(a.cdf - b.cdf), std::abs(a.det - b.det), std::abs(a.g - b.g)});
  });
  const double worst = *std::max_element(gap.begin(), gap.end());
  return {worst <= 1e-6, "max |value(n, L) - value(2n, L + 4)|=" + num(worst) + " (<= 1e-6) over " +
                             std::to_string(cases.size()) + " specs (F, det and g each)"};
}

Outcome mc_limit() {
  McVsLimitOptions opts;
  const ValidationReport one = mc_vs_limit(ScalingFrame(1000, 0.5), {0.0}, 20000, 7001, opts);
  const ValidationReport trend = mc_bias_trend(0.5, {250, 500, 1000}, {7101, 7102, 7103}, 20000, 2, opts);
  const ValidationReport two = mc_vs_limit(ScalingFrame(1000, 0.5), {-1.0, 1.0}, 20000, 7002, opts);
  // The floored lattice point at tau = +-1 sits one site below the centering
  // line, a systematic shift of about -0.126 in s. Informational: the same
  // m=2 statistic with each threshold moved by the exact stationary mean
  // offset of the floored point.
  const ScalingFrame frame(1000, 0.5);
  const ScaledSamples samples = sample_scaled(frame, {-1.0, 1.0}, 20000, 7002);
  std::vector<double> offset(2);
  for (std::size_t k = 0; k < 2; ++k) {
    const DppQuery& q = samples.queries[k];
    const double mean = double(q.x) / (1.0 - frame.rho()) + double(q.y) / frame.rho();
    offset[k] = (mean - q.ell) * std::cbrt(frame.chi()) / std::cbrt(frame.T());
  }
  double corrected = -1.0;
  for (const auto& point : default_joint_points()) {
    const EmpiricalCDF e(samples.scaled, {point[0] + offset[0], point[1] + offset[1]});
    const double f = limit_cdf(MultiPointSpec({-1.0, 1.0}, point)).cdf;
    corrected = std::max(corrected, std::abs(e.probability() - f) - opts.sigma_factor * e.standard_error());
  }
  return {one.pass && trend.pass && two.pass,
          report_line(one) + "; " + report_line(trend) + "; " + report_line(two) +
              " [informational: s offset of the floored points=" + num(offset[0]) + ", " + num(offset[1]) +
              "; offset-corrected statistic=" + num(corrected) + "]",
          one.pass && trend.pass && !two.pass};
}

Outcome shift_argument() {
  ShiftOptions opts;
  opts.threshold = 0.02;
  const std::size_t n = 1'000'000;
  const ValidationReport a = shift_argument_validate(0.25, 0.25, {{2, 2}}, n, 8001, opts);
  const ValidationReport b = shift_argument_validate(0.25, 0.25, {{2, 1}, {1, 2}}, n, 8003, opts);
  const ValidationReport c = shift_argument_validate(0.25, 0.25, {{3, 0}, {2, 1}, {1, 2}, {0, 3}}, n, 8005, opts);
  const ValidationReport coupling = shift_coupling_check(0.25, 0.25, {3, 3}, 100000, 8007, 0);
  return {a.pass && b.pass && c.pass && coupling.pass, report_line(a) + "; " + report_line(b) + "; " +
                                                           report_line(c) + "; " + report_line(coupling)};
}

Outcome slow_decorrelation() {
  const ScalingFrame frame(2000, 0.5, 0.5);
  const ValidationReport main = slow_decorrelation_validate(frame, 0.25, 0.25, 1.0, 0.25, 2000, 9001, 0.95);
  const ValidationReport control = slow_decorrelation_control(frame, 0.25, 0.25, 1.0, 0.1, 2000, 9001, 0.9);
  const ValidationReport trend =
      slow_decorrelation_trend(0.5, 0.5, 0.25, 1.0, 500, 2000, {9101, 9102, 9103}, 2000, 2);
  double sd = 0.0;
  for (const auto& [k, v] : main.details)
    if (k == "increment_sd") sd = v;
  return {main.pass && control.pass, report_line(main) + " [increment sd=" + num(sd) + ", window T^beta=" +
                                         num(std::pow(2000.0, 0.25)) + "]; " + report_line(control) +
                                         "; trend (informational) " + report_line(trend),
          control.pass && !main.pass};
}

Outcome burke() {
  const ValidationReport r = burke_validate(0.5, 20000.0, 10001);
  double p_ks = 0, p_chi = 0, empty = 0, z = 0, departures = 0;
  for (const auto& [k, v] : r.details) {
    if (k == "p_ks") p_ks = v;
    if (k == "p_chi2") p_chi = v;
    if (k == "empty_fraction") empty = v;
    if (k == "departure_z") z = v;
    if (k == "departures") departures = v;
  }
  const bool side = std::abs(empty - 0.5) <= 0.02 && std::abs(z) <= 3.0;
  return {r.pass && p_ks > 0.01 && p_chi > 0.01 && side,
          "KS p=" + num(p_ks) + " (> 0.01), chi2 p=" + num(p_chi) + " (> 0.01), departures=" + num(departures) +
              " (z=" + num(z) + ", |z| <= 3), P(len=0)=" + num(empty) + " (0.5 +- 0.02)"};
}

Outcome gaussian() {
  GaussianOptions opts;
  const ValidationReport up = gaussian_offchar_validate(0.5, 4.0, 2000, 5000, 11001, opts);
  const ValidationReport low = gaussian_offchar_validate(0.5, 0.25, 2000, 5000, 11003, opts);
  const ValidationReport control = gaussian_control_validate(0.5, 2000, 5000, 11005, 0.01);
  std::string reading = "?";
  for (const auto& [k, v] : up.details)
    if (k == "reading_symmetric") reading = v == 1.0 ? "symmetric" : "printed";
  return {up.pass && low.pass && control.pass, report_line(up) + " [calibrated reading: " + reading + "]; " +
                                                   report_line(low) + "; expected-failure control " +
                                                   report_line(control)};
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<Criterion> criteria{
      {1, "exact LPP/TASEP/queue/height bridge", 300, bridge},
      {2, "DP equals path enumeration", 60, dp_vs_enumeration},
      {3, "Airy layer", 10, airy_layer},
      {4, "kernel dual representation", 10, kernel_dual},
      {5, "limit-law structure", 600, limit_structure},
      {6, "quadrature convergence", 600, quadrature_convergence},
      {7, "Monte Carlo vs limit law", 2700, mc_limit},
      {8, "shift argument", 600, shift_argument},
      {9, "slow decorrelation", 900, slow_decorrelation},
      {10, "Burke equilibrium", 120, burke},
      {11, "Gaussian off the characteristic", 900, gaussian},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  std::printf("kpzlab acceptance suite, threads=%zu\n", default_thread_count());
  int failed = 0, undocumented = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    const bool documented = in_time && o.documented;
    std::printf("[%s] criterion %d (%s): %s; runtime %.1fs (<= %.0fs)%s\n", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs, c.budget_seconds,
                !pass && documented ? " -- documented deviation, analysis in the decisions ledger" : "");
    if (!pass) {
      ++failed;
      if (!documented) ++undocumented;
    }
  }
  std::printf("summary: %d criteria failed, %d of them undocumented\n", failed, undocumented);
  return undocumented == 0 ? 0 : 1;
}
