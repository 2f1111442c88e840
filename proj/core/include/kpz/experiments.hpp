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

// Monte Carlo harnesses that confront the simulators with the limit law and
// with the exact side results (shift identity, slow decorrelation, Burke's
// theorem, Gaussian fluctuations off the characteristic).

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kpz/limit_law.hpp"
#include "kpz/lpp.hpp"
#include "kpz/scaling.hpp"
#include "kpz/stochastic.hpp"

namespace kpz {

//---------------------------------------------------------------------------//
// Statistics
//---------------------------------------------------------------------------//

/// sup_x |F_n(x) - cdf(x)| for an unsorted sample.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov tail with Stephens' finite-n correction.
double kolmogorov_pvalue(double d, std::size_t n);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
  std::vector<double> observed;  ///< after pooling
  std::vector<double> expected;
};

/// Pearson chi-square of category counts against probabilities. The last
/// category absorbs the remaining mass; trailing categories are pooled until
/// every expected count is at least 5. Throws RefusalError when fewer than two
/// categories survive.
ChiSquareResult chi_square_test(std::span<const double> counts, std::span<const double> probabilities);

double chi_square_pvalue(double statistic, int dof);

struct JarqueBeraResult {
  double statistic = 0.0;
  double p_value = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

JarqueBeraResult jarque_bera(std::span<const double> sample);

double sample_mean(std::span<const double> sample);
double sample_variance(std::span<const double> sample);  ///< unbiased

/// 1.06 sigma n^{-1/5}. Throws RefusalError for a degenerate sample.
double rule_of_thumb_bandwidth(std::span<const double> sample);

double gaussian_kde(std::span<const double> sample, double at, double bandwidth);

//---------------------------------------------------------------------------//
// Empirical distribution functions
//---------------------------------------------------------------------------//

/// Joint empirical CDF of m coordinates at one threshold vector, plus sorted
/// marginals for cheap one-dimensional queries.
class EmpiricalCDF {
 public:
  /// samples[i][k]: coordinate k of sample i. Throws RefusalError when empty
  /// and ParameterError on ragged input or a threshold of the wrong length.
  EmpiricalCDF(const std::vector<std::vector<double>>& samples, std::vector<double> thresholds);

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return sorted_.size(); }
  const std::vector<double>& thresholds() const noexcept { return thresholds_; }
  std::size_t count() const noexcept { return count_; }

  /// Fraction of samples with every coordinate <= its threshold.
  double probability() const noexcept;
  /// sqrt(p (1 - p) / n).
  double standard_error() const noexcept;

  /// Marginal fraction of coordinate k at or below s.
  double marginal(std::size_t k, double s) const;
  const std::vector<double>& sorted(std::size_t k) const { return sorted_.at(k); }

 private:
  std::vector<std::vector<double>> sorted_;
  std::vector<double> thresholds_;
  std::size_t n_ = 0;
  std::size_t count_ = 0;
};

EmpiricalCDF empirical_cdf_joint(const std::vector<std::vector<double>>& samples,
                                 std::vector<double> thresholds);

//---------------------------------------------------------------------------//
// Sampling
//---------------------------------------------------------------------------//

struct PassageSamples {
  std::vector<LatticePoint> points;       ///< in request order
  std::vector<std::vector<double>> values;  ///< values[i][k] = G at points[k], sample i
};

/// G at `points` for samples 0..n-1 of `master_seed`, in parallel.
PassageSamples sample_passage_times(const ModelParams& params, std::vector<LatticePoint> points,
                                    std::size_t n, std::uint64_t master_seed, std::size_t threads = 0,
                                    double quantum = 0.0);

struct ScaledSamples {
  std::vector<double> taus;
  std::vector<DppQuery> queries;           ///< scaled points (ell at s = 0)
  std::vector<std::vector<double>> raw;     ///< raw[i][k]
  std::vector<std::vector<double>> scaled;  ///< rescaled to the s axis
};

/// Two-sided stationary LPP at scale_dpp(frame, tau_k, 0), rescaled sample by
/// sample with rescale_sample.
ScaledSamples sample_scaled(const ScalingFrame& frame, const std::vector<double>& taus, std::size_t n,
                            std::uint64_t master_seed, std::size_t threads = 0);

//---------------------------------------------------------------------------//
// Reports
//---------------------------------------------------------------------------//

struct ValidationReport {
  std::string name;
  std::string statistic_name;
  double statistic = 0.0;
  std::string relation;  ///< "<=", ">=", "<" or ">": statistic relation threshold passes
  double threshold = 0.0;
  bool pass = false;
  /// Negative control: `pass` means the expected failure was observed.
  bool expected_failure = false;
  double runtime_seconds = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::pair<std::string, double>> details;
};

/// Evaluates `statistic relation threshold`.
bool compare(double statistic, const std::string& relation, double threshold);

//---------------------------------------------------------------------------//
// Monte Carlo against the limit law
//---------------------------------------------------------------------------//

struct McVsLimitOptions {
  /// m = 1: sup-distance over this s grid.
  double s_lo = -6.0;
  double s_hi = 6.0;
  double s_step = 0.1;
  double ks_threshold = 0.05;
  /// m >= 2: |empirical - limit| <= sigma_factor * se + bias_allowance at each point.
  std::vector<std::vector<double>> joint_points;
  double sigma_factor = 3.0;
  double bias_allowance = 0.03;
  QuadratureConfig quad;
  std::size_t threads = 0;
};

/// Joint points used when McVsLimitOptions::joint_points is empty (m = 2).
std::vector<std::vector<double>> default_joint_points();

/// m = 1: KS-type sup distance between the rescaled empirical CDF and
/// limit_cdf on the s grid. m >= 2: worst excess of |empirical - limit| over
/// sigma_factor standard errors, against bias_allowance. Throws RefusalError
/// unless T >= 250 and n >= 10^4.
ValidationReport mc_vs_limit(const ScalingFrame& frame, const std::vector<double>& taus,
                             std::size_t n_samples, std::uint64_t seed, const McVsLimitOptions& opts = {});

/// m = 1 sup distance for each T in `Ts` and each seed; passes when the
/// distance strictly decreases along Ts for at least `required` seeds.
ValidationReport mc_bias_trend(double rho, const std::vector<double>& Ts,
                               const std::vector<std::uint64_t>& seeds, std::size_t n_samples,
                               int required = 2, const McVsLimitOptions& opts = {});

//---------------------------------------------------------------------------//
// Shift identity
//---------------------------------------------------------------------------//

struct ShiftOptions {
  int u_points = 9;  ///< u on the 10%, ..., 90% quantiles of max_k G_k
  double threshold = 0.02;
  std::size_t threads = 0;
};

/// Checks P(u) = P+(u) + (1/(a+b)) sum_k dP+/du_k along the diagonal
/// u_1 = ... = u_m. The derivative sum is the density of max_k (G+_k - u_k)
/// at 0, estimated with a Gaussian kernel. The two models use independent
/// seeds (master_seed for G, master_seed + 1 for G+). Throws ParameterError
/// unless a, b lie in (-1/2, 1/2) with a + b > 0.
ValidationReport shift_argument_validate(double a, double b, const std::vector<LatticePoint>& points,
                                         std::size_t n_samples, std::uint64_t seed,
                                         const ShiftOptions& opts = {});

/// Pathwise G+ = G + w00 from shared weights on a dyadic grid (quantum
/// 2^-24), which makes every path sum exact. Statistic: number of mismatches.
ValidationReport shift_coupling_check(double a, double b, LatticePoint point, std::size_t n_instances,
                                      std::uint64_t seed, std::size_t threads = 0);

//---------------------------------------------------------------------------//
// Slow decorrelation
//---------------------------------------------------------------------------//

struct SlowDecorrelationResult {
  double fraction = 0.0;        ///< fraction with |G(B) - G(A) - r| <= T^beta
  double r = 0.0;               ///< theta T^nu
  double r_lattice = 0.0;       ///< mean increment of the rounded displacement
  LatticePoint A;
  LatticePoint B;
  std::vector<double> increments;  ///< G(B) - G(A) - r_lattice per sample
};

/// Samples G(B) - G(A) with A = (c1 T, c2 T) and B = A + r((1-rho)^2, rho^2)
/// rounded to the lattice, on shared fields. The centering uses the exact
/// stationary mean of the rounded displacement.
SlowDecorrelationResult slow_decorrelation_sample(const ScalingFrame& frame, double c1, double c2,
                                                  double theta, double beta, std::size_t n_samples,
                                                  std::uint64_t seed, std::size_t threads = 0);

/// Fraction >= threshold. Throws ParameterError unless beta lies in
/// (nu/3, 1/3); the negative control goes through slow_decorrelation_control.
ValidationReport slow_decorrelation_validate(const ScalingFrame& frame, double c1, double c2, double theta,
                                             double beta, std::size_t n_samples, std::uint64_t seed,
                                             double threshold = 0.95, std::size_t threads = 0);

/// Negative control with beta < nu/3: passes when the fraction drops below
/// `ceiling`.
ValidationReport slow_decorrelation_control(const ScalingFrame& frame, double c1, double c2, double theta,
                                            double beta, std::size_t n_samples, std::uint64_t seed,
                                            double ceiling = 0.9, std::size_t threads = 0);

/// fraction(T_large) >= fraction(T_small) in at least `required` seeds.
ValidationReport slow_decorrelation_trend(double rho, double nu, double beta, double theta, double T_small,
                                          double T_large, const std::vector<std::uint64_t>& seeds,
                                          std::size_t n_samples, int required = 2, std::size_t threads = 0);

//---------------------------------------------------------------------------//
// Burke's theorem
//---------------------------------------------------------------------------//

struct BurkeOptions {
  std::int64_t queues = 1000;
  double p_threshold = 0.01;
  int snapshots = 20;  ///< times at which P(length = 0) is pooled
};

struct BurkeTrace {
  std::vector<double> departures;             ///< departure times from the last queue
  std::vector<std::int64_t> final_lengths;    ///< per queue at `duration`
  double empty_fraction = 0.0;                ///< pooled over snapshots
};

/// Tandem queues started in equilibrium: i.i.d. lengths with P(k) =
/// (1 - rho) rho^k, Poisson(rho) arrivals into the first queue, Exp(1)
/// services. Throws ParameterError unless 0 < rho < 1.
BurkeTrace simulate_equilibrium_queues(double rho, double duration, std::uint64_t seed,
                                       const BurkeOptions& opts = {});

/// KS of inter-departure times against Exp(mean 1/rho) and chi-square of the
/// final lengths; passes when both p-values exceed the threshold. Throws
/// RefusalError with fewer than 100 departures.
ValidationReport burke_validate(double rho, double duration, std::uint64_t seed, const BurkeOptions& opts = {});

//---------------------------------------------------------------------------//
// Gaussian fluctuations off the characteristic
//---------------------------------------------------------------------------//

/// Two readings of the variance constant on the gamma > gamma_c branch: the
/// printed radicand 1/rho^2 - 1/(gamma (1 - rho^2)) and the one implied by
/// symmetry with the other branch, 1/rho^2 - 1/(gamma (1 - rho)^2).
enum class C2Reading { kPrinted, kSymmetric, kCalibrated };

struct GaussianConstants {
  double mean = 0.0;  ///< c1 or b1
  double sd = 0.0;    ///< c2 or b2
  bool upper_branch = true;  ///< gamma > gamma_c
};

/// Throws RefusalError at gamma = gamma_c, ParameterError for a negative
/// radicand under the printed reading. The lower branch uses the absolute
/// value of the b2 radicand, which is negative as printed for gamma < gamma_c.
GaussianConstants gaussian_constants(double rho, double gamma, C2Reading reading);

/// Where each branch's constants describe this model exactly. The gamma >
/// gamma_c constants are written for a bottom row of mean 1/rho, the mirror of
/// this model, so that branch samples (N / (1 + gamma), gamma N / (1 + gamma)).
/// The gamma < gamma_c constants match the model at (gamma N / (1 + gamma),
/// N / (1 + gamma)). Both points coincide in law at rho = 1/2.
LatticePoint gaussian_sample_point(double rho, double gamma, double N);

struct GaussianOptions {
  C2Reading reading = C2Reading::kCalibrated;
  double ks_threshold = 0.05;
  double calibration_ratio = 4.0;  ///< calibration run at N / ratio
  std::size_t threads = 0;
};

/// Standardizes G with (c1, c2) or (b1, b2) and takes the KS distance to
/// N(0, 1). Under kCalibrated on the upper branch, a second run at N / ratio
/// gives the variance slope A = mean(Var G / N) over both sizes, and the
/// reading whose c2^2 is closer to A wins.
ValidationReport gaussian_offchar_validate(double rho, double gamma, double N, std::size_t n_samples,
                                           std::uint64_t seed, const GaussianOptions& opts = {});

/// Negative control on the characteristic gamma = gamma_c: empirical
/// standardization and Jarque-Bera; passes when normality is rejected at
/// p < p_ceiling.
ValidationReport gaussian_control_validate(double rho, double N, std::size_t n_samples, std::uint64_t seed,
                                           double p_ceiling = 0.01, std::size_t threads = 0);

}  // namespace kpz
