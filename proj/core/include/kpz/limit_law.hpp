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

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace kpz {

/// Strictly increasing times tau_1 < ... < tau_m with thresholds s_1..s_m.
class MultiPointSpec {
 public:
  static constexpr std::size_t kMaxPoints = 8;

  /// Throws ParameterError on size mismatch, m outside [1, 8], non-finite
  /// entries or taus that are not strictly increasing.
  MultiPointSpec(std::vector<double> taus, std::vector<double> esses);

  std::size_t m() const noexcept { return taus_.size(); }
  const std::vector<double>& taus() const noexcept { return taus_; }
  const std::vector<double>& esses() const noexcept { return esses_; }
  double tau(std::size_t i) const { return taus_.at(i); }
  double s(std::size_t i) const { return esses_.at(i); }

  /// Copy with s_k replaced.
  MultiPointSpec with_s(std::size_t k, double value) const;

 private:
  std::vector<double> taus_;
  std::vector<double> esses_;
};

struct QuadratureConfig {
  int nodes = 64;          ///< Gauss-Legendre nodes per interval [s_k, s_k + Lambda]
  double truncation = 12;  ///< Lambda
  double fd_step = 1e-2;   ///< central-difference step in s_k
  int lambda_nodes = 16;   ///< Gauss-Legendre nodes per lambda panel
  double lambda_panel = 0.5;

  /// Throws ParameterError unless nodes >= 16, Lambda >= 8 and fd_step in [1e-5, 1e-2].
  void validate() const;
  /// (2n, Lambda + 4), used for convergence checks.
  QuadratureConfig refined() const;
};

//---------------------------------------------------------------------------//
// Kernel
//---------------------------------------------------------------------------//

/// [K_hat]_{i,j}(x, y) with 1-based block indices. For tau_i > tau_j the
/// lambda >= 0 integral minus the Gaussian term is used. Throws DomainError
/// for indices outside [1, m].
double khat(const MultiPointSpec& spec, std::size_t i, std::size_t j, double x, double y);

/// The Gaussian term subtracted from the tau_i > tau_j branch.
double khat_gaussian(double tau_i, double tau_j, double x, double y);

struct DualCheck {
  double lhs = 0.0;        ///< -integral over (-inf, 0], truncated with a tail certificate
  double rhs = 0.0;        ///< lambda >= 0 integral minus the Gaussian term
  double gap = 0.0;        ///< |lhs - rhs|
  double tail_bound = 0.0; ///< bound on the discarded part of lhs
};

/// Both representations of the tau_i > tau_j branch. Throws ParameterError
/// unless tau_i > tau_j.
DualCheck khat_dual_check(const MultiPointSpec& spec, std::size_t i, std::size_t j, double x,
                          double y);

/// Integral over the real line of exp(-lambda (b2 - b1)) Ai(b1^2 + c1 + lambda)
/// Ai(b2^2 + c2 + lambda) against its closed Gaussian form. Throws
/// ParameterError unless b2 < b1.
DualCheck airy_identity_f(double b1, double b2, double c1, double c2);

//---------------------------------------------------------------------------//
// Definition terms
//---------------------------------------------------------------------------//

/// R, Psi_j and Phi_i tabulated at the Gauss-Legendre nodes of each interval.
struct Def11Terms {
  double R = 0.0;
  std::vector<std::vector<double>> nodes;    ///< nodes[k]: nodes on [s_k, s_k + Lambda]
  std::vector<std::vector<double>> weights;  ///< weights[k]
  std::vector<std::vector<double>> psi;      ///< psi[j][q] = Psi_j(nodes[j][q])
  std::vector<std::vector<double>> phi;      ///< phi[i][p] = Phi_i(nodes[i][p])
};

Def11Terms def11_terms(const MultiPointSpec& spec, const QuadratureConfig& quad = {});

/// Direct evaluations by nested adaptive quadrature, used as independent
/// references for the tabulated terms. Block indices are 1-based.
double def11_R(const MultiPointSpec& spec);
double def11_psi(const MultiPointSpec& spec, std::size_t j, double y);
double def11_phi(const MultiPointSpec& spec, std::size_t i, double x);

//---------------------------------------------------------------------------//
// Nystrom system
//---------------------------------------------------------------------------//

/// D[(i, p), (j, q)] = sqrt(w_p w_q) K_hat_{i,j}(x_p, x_q) on [s_k, s_k + Lambda],
/// with an LU factorization of I - D.
class NystromSystem {
 public:
  NystromSystem(const MultiPointSpec& spec, const QuadratureConfig& quad);
  ~NystromSystem();
  NystromSystem(NystromSystem&&) noexcept;
  NystromSystem& operator=(NystromSystem&&) noexcept;

  std::size_t size() const noexcept;  ///< m n
  double entry(std::size_t row, std::size_t col) const;
  /// det(I - D).
  double determinant() const;
  /// (I - D)^{-1} rhs.
  std::vector<double> solve(const std::vector<double>& rhs) const;
  /// D v.
  std::vector<double> apply(const std::vector<double>& v) const;
  /// Upper end of the lambda grid.
  double lambda_extent() const noexcept;
  bool all_finite() const;

  /// Replaces D by -D and refactors. Fault injection for the guard.
  void negate_kernel();

  struct Impl;

 private:
  friend class NystromBuilder;
  explicit NystromSystem(std::unique_ptr<Impl> impl);

  std::unique_ptr<Impl> impl_;
};

double fredholm_det(const MultiPointSpec& spec, const QuadratureConfig& quad = {});

/// g = R - <Psi, Phi> - Psi~^T (I - D)^{-1} D Phi~ on the Nystrom grid. Throws
/// InvertibilityError if the guard fails.
double g_m(const MultiPointSpec& spec, const QuadratureConfig& quad = {});

struct GuardReport {
  bool ok = true;
  double det = 0.0;
  std::string diagnostics;
};

/// det(I - D) must lie in (0, 1 + 1e-8]: the exact determinant is a
/// probability bounded below by the GOE Tracy-Widom value at min s_k.
GuardReport invertibility_guard(const NystromSystem& system);
GuardReport invertibility_guard(const MultiPointSpec& spec, const QuadratureConfig& quad = {});

//---------------------------------------------------------------------------//
// Distribution function
//---------------------------------------------------------------------------//

struct LimitLawResult {
  double cdf = 0.0;                 ///< F
  double det = 0.0;                 ///< det(I - D) at s
  double g = 0.0;                   ///< g_m at s
  std::vector<double> partials;     ///< d/ds_k (g det)
  std::vector<double> richardson;   ///< |D_h - D_{h/2}| per k
  int nodes = 0;
  double truncation = 0.0;
  double lambda_extent = 0.0;
};

/// F = sum_k d/ds_k [g_m det] by Richardson-extrapolated central differences.
/// Throws AccuracyError when F leaves [-1e-3, 1 + 1e-3].
LimitLawResult limit_cdf(const MultiPointSpec& spec, const QuadratureConfig& quad = {});

/// Value of g_m det at s, the quantity differentiated by limit_cdf.
double limit_potential(const MultiPointSpec& spec, const QuadratureConfig& quad = {});

}  // namespace kpz
