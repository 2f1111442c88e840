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

#include "kpz/lpp.hpp"

#include <algorithm>
#include <string>

#include "kpz/errors.hpp"

namespace kpz {

PointSet::PointSet(std::vector<LatticePoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw ParameterError("PointSet: no points");
  for (const auto& p : points_) {
    if (p.x < 0 || p.y < 0) throw DomainError("PointSet: negative coordinate");
    if (p.x >= kMaxSweepExtent || p.y >= kMaxSweepExtent)
      throw DomainError("PointSet: point outside the sweep envelope");
  }
  // Sort by row first so the sweep can capture points as rows complete.
  std::sort(points_.begin(), points_.end(), [](const LatticePoint& l, const LatticePoint& r) {
    return l.y != r.y ? l.y < r.y : l.x < r.x;
  });
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  for (const auto& p : points_) {
    max_x_ = std::max(max_x_, p.x);
    max_y_ = std::max(max_y_, p.y);
  }
}

double PassageResult::at(LatticePoint p) const {
  auto it = values.find(p);
  if (it == values.end())
    throw DomainError("PassageResult: point (" + std::to_string(p.x) + ", " +
                      std::to_string(p.y) + ") was not requested");
  return it->second;
}

namespace {

// One row-sweep over the rectangle [x0, x1] x [y0, y1], starting at (x0, y0).
// `on_row(y, row)` is called after each completed row.
template <typename OnRow>
void sweep(const WeightOracle& oracle, std::int64_t x0, std::int64_t y0, std::int64_t x1,
           std::int64_t y1, OnRow&& on_row) {
  const auto width = static_cast<std::size_t>(x1 - x0 + 1);
  std::vector<double> g(width);
  std::vector<double> w(width);
  oracle.fill_row(y0, x0, w);
  g[0] = w[0];
  for (std::size_t k = 1; k < width; ++k) g[k] = w[k] + g[k - 1];
  on_row(y0, std::span<const double>(g));
  for (std::int64_t y = y0 + 1; y <= y1; ++y) {
    oracle.fill_row(y, x0, w);
    g[0] = w[0] + g[0];
    for (std::size_t k = 1; k < width; ++k) {
      const double left = g[k - 1];
      const double down = g[k];
      g[k] = w[k] + (left >= down ? left : down);
    }
    on_row(y, std::span<const double>(g));
  }
}

}  // namespace

PassageResult last_passage(const WeightOracle& oracle, const PointSet& points) {
  PassageResult result;
  result.sample_index = oracle.seed().sample_index;
  auto pts = points.points();
  std::size_t next = 0;
  sweep(oracle, 0, 0, points.max_x(), points.max_y(),
        [&](std::int64_t y, std::span<const double> row) {
          while (next < pts.size() && pts[next].y == y) {
            result.values.emplace(pts[next], row[static_cast<std::size_t>(pts[next].x)]);
            ++next;
          }
        });
  return result;
}

double last_passage_point_to_point(const WeightOracle& oracle, LatticePoint from,
                                   LatticePoint to) {
  if (from.x < 0 || from.y < 0) throw DomainError("point-to-point: negative start");
  if (from.x > to.x || from.y > to.y)
    throw DomainError("point-to-point: start must be <= end componentwise");
  double value = 0.0;
  sweep(oracle, from.x, from.y, to.x, to.y, [&](std::int64_t y, std::span<const double> row) {
    if (y == to.y) value = row.back();
  });
  return value;
}

std::vector<double> materialize_weights(const WeightOracle& oracle, std::int64_t max_x,
                                        std::int64_t max_y) {
  const auto width = static_cast<std::size_t>(max_x + 1);
  std::vector<double> field(width * static_cast<std::size_t>(max_y + 1));
  for (std::int64_t y = 0; y <= max_y; ++y)
    oracle.fill_row(y, 0, std::span<double>(field).subspan(static_cast<std::size_t>(y) * width, width));
  return field;
}

namespace {

struct PathEnumerator {
  const std::vector<double>& field;
  std::size_t width;
  std::int64_t tx;
  std::int64_t ty;
  double best;

  // Sums in path order from the origin, matching the sweep's association.
  void walk(std::int64_t x, std::int64_t y, double sum) {
    if (x == tx && y == ty) {
      if (sum > best) best = sum;
      return;
    }
    if (x < tx) walk(x + 1, y, field[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x + 1)] + sum);
    if (y < ty) walk(x, y + 1, field[static_cast<std::size_t>(y + 1) * width + static_cast<std::size_t>(x)] + sum);
  }
};

}  // namespace

double brute_force_last_passage(const WeightOracle& oracle, LatticePoint target) {
  if (target.x < 0 || target.y < 0) throw DomainError("brute force: negative target");
  if (target.x + target.y > kBruteForceMaxSteps)
    throw RefusalError("brute force: x + y exceeds " + std::to_string(kBruteForceMaxSteps));
  const auto field = materialize_weights(oracle, target.x, target.y);
  PathEnumerator e{field, static_cast<std::size_t>(target.x + 1), target.x, target.y,
                   -1.0};
  e.walk(0, 0, field[0]);
  return e.best;
}

}  // namespace kpz
