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

#include <cstdint>

namespace kpz {

/// Macroscopic time T, density rho and the off-line exponent nu.
class ScalingFrame {
 public:
  /// Throws ParameterError unless T > 0, 0 < rho < 1 and 0 < nu < 1.
  ScalingFrame(double T, double rho, double nu = 0.5);

  double T() const noexcept { return T_; }
  double rho() const noexcept { return rho_; }
  double nu() const noexcept { return nu_; }
  /// chi = rho (1 - rho), in (0, 1/4].
  double chi() const noexcept { return chi_; }

  /// 2 chi^{4/3} / (1 - 2 chi): lattice displacement per unit tau on the T^{2/3} scale.
  double lateral_coefficient() const noexcept;
  /// 2 (1 - 2 rho) chi^{1/3} / (1 - 2 chi): drift of the centering per unit tau.
  double drift_coefficient() const noexcept;

 private:
  double T_;
  double rho_;
  double nu_;
  double chi_;
};

/// rho^2 / (1 - rho)^2, the critical ratio y/x. Throws if rho is outside (0, 1).
double characteristic_ratio(double rho);

struct DppQuery {
  std::int64_t x = 0;
  std::int64_t y = 0;
  double ell = 0.0;  ///< threshold, kept real-valued
};

/// Lattice point and threshold for displacement tau and fluctuation s on the
/// line x + y ~ (1 - 2 chi) T. Throws FrameError on negative coordinates.
DppQuery scale_dpp(const ScalingFrame& frame, double tau, double s);

/// As scale_dpp, with the point moved by theta T^nu along the critical direction.
DppQuery scale_dpp_ext(const ScalingFrame& frame, double tau, double theta, double s);

struct ParticleQuery {
  std::int64_t n = 0;  ///< particle label
  std::int64_t q = 0;  ///< site threshold
};

/// Particle label n(tau) and site q(tau, s) for the tagged-particle observable:
/// x_n(T) >= q  <=>  G(q + n, n) <= T. Sites may be negative; a negative label
/// throws FrameError.
ParticleQuery scale_particle(const ScalingFrame& frame, double tau, double s);

struct HeightQuery {
  std::int64_t J = 0;  ///< site
  std::int64_t H = 0;  ///< height threshold
};

/// Site J(tau) and height threshold H(tau, s) for the height observable.
HeightQuery scale_height(const ScalingFrame& frame, double tau, double s);

/// Inverse of scale_dpp's threshold in s: maps a last-passage value to the
/// fluctuation coordinate.
double rescale_sample(const ScalingFrame& frame, double tau, double passage_value);

}  // namespace kpz
