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

#include "kpz/scaling.hpp"

#include <cmath>
#include <limits>

#include "kpz/errors.hpp"

namespace kpz {

ScalingFrame::ScalingFrame(double T, double rho, double nu)
    : T_(T), rho_(rho), nu_(nu), chi_(rho * (1.0 - rho)) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("frame: T must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("frame: rho must lie in (0, 1)");
  if (!(nu > 0.0 && nu < 1.0)) throw ParameterError("frame: nu must lie in (0, 1)");
}

double ScalingFrame::lateral_coefficient() const noexcept {
  return 2.0 * std::pow(chi_, 4.0 / 3.0) / (1.0 - 2.0 * chi_);
}

double ScalingFrame::drift_coefficient() const noexcept {
  return 2.0 * (1.0 - 2.0 * rho_) * std::cbrt(chi_) / (1.0 - 2.0 * chi_);
}

double characteristic_ratio(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("characteristic_ratio: rho outside (0, 1)");
  const double r = rho / (1.0 - rho);
  return r * r;
}

namespace {

std::int64_t checked_floor(double v, const char* what) {
  const double f = std::floor(v);
  if (!std::isfinite(f) || std::abs(f) > 9.0e15) throw FrameError(std::string(what) + " overflows");
  return static_cast<std::int64_t>(f);
}

DppQuery scale_common(const ScalingFrame& f, double tau, double macro_time, double s) {
  const double t23 = std::pow(f.T(), 2.0 / 3.0);
  const double t13 = std::cbrt(f.T());
  const double lateral = tau * f.lateral_coefficient() * t23;
  const double one_minus = 1.0 - f.rho();
  DppQuery q;
  q.x = checked_floor(one_minus * one_minus * macro_time + lateral, "x");
  q.y = checked_floor(f.rho() * f.rho() * macro_time - lateral, "y");
  q.ell = macro_time - tau * f.drift_coefficient() * t23 + s * t13 / std::cbrt(f.chi());
  if (q.x < 0 || q.y < 0) throw FrameError("scaled point has a negative coordinate; frame too small");
  return q;
}

}  // namespace

DppQuery scale_dpp(const ScalingFrame& frame, double tau, double s) {
  return scale_common(frame, tau, frame.T(), s);
}

DppQuery scale_dpp_ext(const ScalingFrame& frame, double tau, double theta, double s) {
  return scale_common(frame, tau, frame.T() + theta * std::pow(frame.T(), frame.nu()), s);
}

ParticleQuery scale_particle(const ScalingFrame& frame, double tau, double s) {
  const double T = frame.T();
  const double t23 = std::pow(T, 2.0 / 3.0);
  const double t13 = std::cbrt(T);
  const double c13 = std::cbrt(frame.chi());
  const double rho = frame.rho();
  ParticleQuery q;
  q.n = checked_floor(rho * rho * T - 2.0 * tau * rho * c13 * t23, "n");
  // Leading term (1 - 2 rho) T, so that q + n sits on the last-passage point
  // (p, n) with p ~ (1 - rho)^2 T.
  q.q = checked_floor((1.0 - 2.0 * rho) * T + 2.0 * tau * c13 * t23 -
                          (1.0 - rho) * s * t13 / c13,
                      "q");
  if (q.n < 0) throw FrameError("particle query has a negative label");
  return q;
}

HeightQuery scale_height(const ScalingFrame& frame, double tau, double s) {
  const double T = frame.T();
  const double t23 = std::pow(T, 2.0 / 3.0);
  const double t13 = std::cbrt(T);
  const double c13 = std::cbrt(frame.chi());
  const double rho = frame.rho();
  HeightQuery q;
  q.J = checked_floor((1.0 - 2.0 * rho) * T + 2.0 * tau * c13 * t23, "J");
  q.H = checked_floor((1.0 - 2.0 * frame.chi()) * T + 2.0 * tau * (1.0 - 2.0 * rho) * c13 * t23 -
                          2.0 * s * c13 * c13 * t13,
                      "H");
  return q;
}

double rescale_sample(const ScalingFrame& frame, double tau, double passage_value) {
  const double t23 = std::pow(frame.T(), 2.0 / 3.0);
  const double t13 = std::cbrt(frame.T());
  return (passage_value - frame.T() + tau * frame.drift_coefficient() * t23) *
         std::cbrt(frame.chi()) / t13;
}

}  // namespace kpz
