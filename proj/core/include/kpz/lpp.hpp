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

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "kpz/stochastic.hpp"

namespace kpz {

struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

/// Deduplicated, sorted set of non-negative lattice points.
class PointSet {
 public:
  /// Throws DomainError on negative coordinates and ParameterError when empty.
  explicit PointSet(std::vector<LatticePoint> points);

  std::span<const LatticePoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::int64_t max_x() const noexcept { return max_x_; }
  std::int64_t max_y() const noexcept { return max_y_; }

 private:
  std::vector<LatticePoint> points_;
  std::int64_t max_x_ = 0;
  std::int64_t max_y_ = 0;
};

/// Last-passage values G(x, y) for the requested points of one sample.
struct PassageResult {
  std::map<LatticePoint, double> values;
  std::uint64_t sample_index = 0;

  /// Throws DomainError when `p` was not requested.
  double at(LatticePoint p) const;
};

/// Largest row length accepted by the sweep (memory guard).
inline constexpr std::int64_t kMaxSweepExtent = std::int64_t{1} << 28;

/// G(x, y) = w(x, y) + max(G(x-1, y), G(x, y-1)) from the origin, for every
/// point of `points`, in one serial row sweep with O(max_x) memory.
///
/// Ties go to the horizontal predecessor; the value does not depend on it.
PassageResult last_passage(const WeightOracle& oracle, const PointSet& points);

/// Maximal weight over up-right paths from `from` to `to`, both endpoints
/// included. Throws DomainError unless from <= to componentwise.
double last_passage_point_to_point(const WeightOracle& oracle, LatticePoint from,
                                   LatticePoint to);

/// Largest x + y that brute_force_last_passage accepts.
inline constexpr std::int64_t kBruteForceMaxSteps = 22;

/// Exact maximum over every explicitly enumerated up-right path from the
/// origin. Refuses (RefusalError) when x + y exceeds kBruteForceMaxSteps.
double brute_force_last_passage(const WeightOracle& oracle, LatticePoint target);

/// Row-major dense field w(i, j), 0 <= i <= max_x, 0 <= j <= max_y.
std::vector<double> materialize_weights(const WeightOracle& oracle, std::int64_t max_x,
                                        std::int64_t max_y);

}  // namespace kpz
