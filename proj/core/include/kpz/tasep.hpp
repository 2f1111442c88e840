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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kpz/stochastic.hpp"

namespace kpz {

/// Omega(i, j): the Exp(1) waiting time of particle j for its jump from site
/// i - j - 1 to i - j. A pure function of (seed, i, j).
class WaitingTimes {
 public:
  explicit WaitingTimes(SeedSpec seed) noexcept : rng_(seed, StreamTag::kWaitingTimes) {}

  double operator()(std::int64_t i, std::int64_t j) const noexcept {
    return exp_from_uniform(rng_.uniform(i, j), 1.0);
  }

 private:
  CounterRng rng_;
};

struct SiteWindow {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

/// Particles carry consecutive labels label_lo (rightmost) .. label_hi
/// (leftmost); positions decrease with the label.
class TasepState {
 public:
  /// Builds a state from occupied sites (any order). Label 0 goes to the
  /// smallest occupied site >= 0, labels grow to the left. Particles may move
  /// up to `window.hi`; a jump beyond it leaves the system when `open_right` is
  /// set and raises BoundaryError otherwise.
  TasepState(std::vector<std::int64_t> occupied, SiteWindow window, bool open_right);

  double time() const noexcept { return time_; }
  std::int64_t current() const noexcept { return n_t_; }  ///< jumps across bond 0 -> 1
  std::int64_t label_lo() const noexcept { return label_lo_; }
  std::int64_t label_hi() const noexcept { return label_hi_; }
  SiteWindow window() const noexcept { return {site_min_, site_max_}; }

  bool has_label(std::int64_t n) const noexcept { return n >= label_lo_ && n <= label_hi_; }
  /// x_n(t). Throws DomainError for unknown labels, BoundaryError if it left.
  std::int64_t position(std::int64_t n) const;
  /// x_n(0).
  std::int64_t initial_position(std::int64_t n) const;
  bool exited(std::int64_t n) const;
  bool occupied(std::int64_t site) const;

  /// h_t(j) with h_t(0) = 2 N_t and increments 1 - 2 eta. j must lie in the window.
  std::int64_t height(std::int64_t j) const;

  /// Runs all jumps with time <= t_end. Throws ParameterError if t_end < time().
  void evolve(const WaitingTimes& omega, double t_end);

  /// Time particle n reached `site`, if it has (std::nullopt for sites at or
  /// left of its initial position).
  std::optional<double> arrival_time(std::int64_t n, std::int64_t site) const;

 private:
  struct Particle {
    std::int64_t x0 = 0;
    std::int64_t x = 0;
    double next = 0.0;  // scheduled jump time; +inf when blocked
    bool exited = false;
    std::vector<double> arrivals;  // arrivals[k] = time it reached x0 + k + 1
  };

  std::size_t slot(std::int64_t n) const;
  void arm(std::int64_t n, double from, const WaitingTimes& omega);

  std::vector<Particle> particles_;
  std::vector<std::uint8_t> occ_;  // indexed by site - site_min_
  std::int64_t label_lo_ = 0;
  std::int64_t label_hi_ = -1;
  std::int64_t site_min_ = 0;
  std::int64_t site_max_ = 0;
  bool open_right_ = false;
  bool armed_ = false;
  double time_ = 0.0;
  std::int64_t n_t_ = 0;
  // Min-heap of (time, label) pending jumps.
  std::vector<std::pair<double, std::int64_t>> heap_;
};

/// Bernoulli(rho) occupation of `fill`, from the occupation stream of `seed`,
/// followed by an empty runway of `runway` sites. Throws ParameterError unless
/// 0 < rho < 1 and the window is non-empty, BoundaryError when no site >= 0 is
/// occupied (label 0 undefined).
TasepState init_stationary(double rho, SiteWindow fill, SeedSpec seed, std::int64_t runway);

/// Runway that keeps a free leading particle inside the window up to t_end
/// with overwhelming probability: t_end + max(10 sqrt(t_end), 50).
std::int64_t runway_for(double t_end);

void evolve(TasepState& state, const WaitingTimes& omega, double t_end);

//---------------------------------------------------------------------------//
// Tandem queues
//---------------------------------------------------------------------------//

/// FIFO queues in series with Exp(1) services. Customer j's service at queue q
/// is Omega(q + 1, j). Customers with smaller labels are ahead.
class TandemQueues {
 public:
  /// Customers (label, queue) at time 0.
  explicit TandemQueues(std::vector<std::pair<std::int64_t, std::int64_t>> customers);

  /// Customers of a TASEP configuration: customer j sits in queue x_j(0) + j.
  static TandemQueues from_tasep(const TasepState& state);

  void evolve(const WaitingTimes& omega, double t_end);

  double time() const noexcept { return time_; }
  /// Q_j(t). Throws DomainError for unknown customers.
  std::int64_t queue_of(std::int64_t j) const;
  std::int64_t queue_length(std::int64_t q) const;

  /// First time customer j left queue i, if it has.
  std::optional<double> exit_time(std::int64_t j, std::int64_t i) const;

 private:
  struct Customer {
    std::int64_t queue = 0;
    std::int64_t q0 = 0;
    std::vector<double> exits;  // exits[k]: time it left queue q0 + k
  };
  void start_service(std::int64_t q, double from, const WaitingTimes& omega);

  std::map<std::int64_t, Customer> customers_;
  std::map<std::int64_t, std::set<std::int64_t>> queues_;  // queue -> labels, head first
  std::vector<std::pair<double, std::int64_t>> heap_;            // (completion, queue)
  double time_ = 0.0;
  bool started_ = false;
};

/// E_j(i); std::nullopt while the event has not occurred.
std::optional<double> queue_exit_time(const TandemQueues& history, std::int64_t j, std::int64_t i);

//---------------------------------------------------------------------------//
// Exact bridge
//---------------------------------------------------------------------------//

/// Curve-to-point last-passage time L(x, y) over
/// D = {i <= x, j <= y, i - j > x_j(0)} for the particles of `state`'s initial
/// configuration, using L(i, j) = Omega(i, j) + max(L(i-1, j), L(i, j-1)) with
/// L = 0 outside D. Equals the time particle y reaches site x - y.
double domain_last_passage(const TasepState& initial, const WaitingTimes& omega, std::int64_t x,
                           std::int64_t y);

struct BridgeReport {
  bool ok = true;
  std::int64_t checks = 0;
  std::string witness;  ///< first violation, empty when ok
};

/// One shared-randomness instance: a Bernoulli(1/2) initial condition on a
/// window around the origin with site 0 empty and site 1 occupied. For every t
/// in `t_grid` it asserts
///   x_y(t) >= x - y  <=>  L(x, y) <= t                 (last passage)
///                    <=>  E_y(x - 1) <= t              (tandem queues)
///                    <=>  h_t(x - y - 1) >= x + y - 1  (height function)
/// and x_j(t) = Q_j(t) - j for every particle.
BridgeReport lpp_bridge_check(SeedSpec seed, std::int64_t x, std::int64_t y,
                              std::span<const double> t_grid);

}  // namespace kpz
