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

#include "kpz/tasep.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "kpz/errors.hpp"

namespace kpz {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

using Event = std::pair<double, std::int64_t>;

// Min-heap on time, ties broken by label so replays are deterministic.
struct Later {
  bool operator()(const Event& l, const Event& r) const noexcept {
    return l.first != r.first ? l.first > r.first : l.second > r.second;
  }
};

void push_event(std::vector<Event>& heap, double t, std::int64_t id) {
  heap.emplace_back(t, id);
  std::push_heap(heap.begin(), heap.end(), Later{});
}

Event pop_event(std::vector<Event>& heap) {
  std::pop_heap(heap.begin(), heap.end(), Later{});
  Event e = heap.back();
  heap.pop_back();
  return e;
}

}  // namespace

//---------------------------------------------------------------------------//
// TasepState
//---------------------------------------------------------------------------//

TasepState::TasepState(std::vector<std::int64_t> occupied, SiteWindow window, bool open_right)
    : site_min_(window.lo), site_max_(window.hi), open_right_(open_right) {
  if (occupied.empty()) throw ParameterError("TasepState: no particles");
  std::sort(occupied.begin(), occupied.end());
  if (std::adjacent_find(occupied.begin(), occupied.end()) != occupied.end())
    throw ParameterError("TasepState: a site is occupied twice");
  if (occupied.front() < site_min_ || occupied.back() > site_max_)
    throw ParameterError("TasepState: particle outside the window");
  const auto zero_it = std::lower_bound(occupied.begin(), occupied.end(), std::int64_t{0});
  if (zero_it == occupied.end())
    throw BoundaryError("TasepState: no occupied site >= 0, label 0 undefined");
  const auto zero_idx = static_cast<std::int64_t>(zero_it - occupied.begin());
  const auto count = static_cast<std::int64_t>(occupied.size());
  // Sorted ascending: index k has label zero_idx - k.
  label_hi_ = zero_idx;
  label_lo_ = zero_idx - (count - 1);
  occ_.assign(static_cast<std::size_t>(site_max_ - site_min_ + 1), 0);
  particles_.resize(occupied.size());
  for (std::int64_t n = label_lo_; n <= label_hi_; ++n) {
    const std::int64_t x = occupied[static_cast<std::size_t>(zero_idx - n)];
    Particle& p = particles_[slot(n)];
    p.x0 = x;
    p.x = x;
    occ_[static_cast<std::size_t>(x - site_min_)] = 1;
  }
}

std::size_t TasepState::slot(std::int64_t n) const {
  if (!has_label(n)) throw DomainError("TasepState: unknown label " + std::to_string(n));
  return static_cast<std::size_t>(n - label_lo_);
}

std::int64_t TasepState::position(std::int64_t n) const {
  const Particle& p = particles_[slot(n)];
  if (p.exited) throw BoundaryError("TasepState: particle " + std::to_string(n) + " left the window");
  return p.x;
}

std::int64_t TasepState::initial_position(std::int64_t n) const { return particles_[slot(n)].x0; }

bool TasepState::exited(std::int64_t n) const { return particles_[slot(n)].exited; }

bool TasepState::occupied(std::int64_t site) const {
  if (site < site_min_ || site > site_max_) throw DomainError("TasepState: site outside the window");
  return occ_[static_cast<std::size_t>(site - site_min_)] != 0;
}

std::int64_t TasepState::height(std::int64_t j) const {
  std::int64_t h = 2 * n_t_;
  if (j >= 1) {
    for (std::int64_t i = 1; i <= j; ++i) h += occupied(i) ? -1 : 1;
  } else {
    for (std::int64_t i = j + 1; i <= 0; ++i) h -= occupied(i) ? -1 : 1;
  }
  return h;
}

std::optional<double> TasepState::arrival_time(std::int64_t n, std::int64_t site) const {
  const Particle& p = particles_[slot(n)];
  const std::int64_t k = site - p.x0 - 1;
  if (k < 0 || k >= static_cast<std::int64_t>(p.arrivals.size())) return std::nullopt;
  return p.arrivals[static_cast<std::size_t>(k)];
}

// Schedules particle n's next jump, counted from `from`, if its target is empty.
void TasepState::arm(std::int64_t n, double from, const WaitingTimes& omega) {
  Particle& p = particles_[slot(n)];
  if (p.exited) return;
  const std::int64_t target = p.x + 1;
  const bool blocked = target <= site_max_ && occ_[static_cast<std::size_t>(target - site_min_)];
  if (blocked) {
    p.next = kNever;
    return;
  }
  // Jump from x to x + 1 is Omega(i, n) with i - n = x + 1.
  p.next = from + omega(target + n, n);
  push_event(heap_, p.next, n);
}

void TasepState::evolve(const WaitingTimes& omega, double t_end) {
  if (t_end < time_) throw ParameterError("evolve: t_end precedes the current time");
  if (!armed_) {
    for (std::int64_t n = label_lo_; n <= label_hi_; ++n) arm(n, 0.0, omega);
    armed_ = true;
  }
  while (!heap_.empty() && heap_.front().first <= t_end) {
    const auto [t, n] = pop_event(heap_);
    Particle& p = particles_[slot(n)];
    if (p.exited || p.next != t) continue;
    const std::int64_t from = p.x;
    const std::int64_t to = from + 1;
    if (to > site_max_) {
      if (!open_right_)
        throw BoundaryError("evolve: particle " + std::to_string(n) + " reached the window edge " +
                            std::to_string(site_max_));
      p.exited = true;
      occ_[static_cast<std::size_t>(from - site_min_)] = 0;
    } else {
      assert(!occ_[static_cast<std::size_t>(to - site_min_)]);
      occ_[static_cast<std::size_t>(from - site_min_)] = 0;
      occ_[static_cast<std::size_t>(to - site_min_)] = 1;
      p.x = to;
      p.arrivals.push_back(t);
      arm(n, t, omega);
    }
    if (from == 0) ++n_t_;
    // The follower may have been waiting for `from` to clear.
    if (has_label(n + 1)) {
      Particle& f = particles_[slot(n + 1)];
      if (!f.exited && f.x == from - 1 && f.next == kNever) arm(n + 1, t, omega);
      assert(f.x < from);
    }
  }
  time_ = t_end;
}

void evolve(TasepState& state, const WaitingTimes& omega, double t_end) {
  state.evolve(omega, t_end);
}

std::int64_t runway_for(double t_end) {
  if (!(t_end >= 0.0)) throw ParameterError("runway_for: t_end must be non-negative");
  return static_cast<std::int64_t>(std::ceil(t_end + std::max(10.0 * std::sqrt(t_end), 50.0)));
}

TasepState init_stationary(double rho, SiteWindow fill, SeedSpec seed, std::int64_t runway) {
  if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("init_stationary: rho must lie in (0, 1)");
  if (fill.hi < fill.lo) throw ParameterError("init_stationary: empty window");
  if (runway < 0) throw ParameterError("init_stationary: negative runway");
  const CounterRng rng(seed, StreamTag::kOccupation);
  std::vector<std::int64_t> occupied;
  for (std::int64_t s = fill.lo; s <= fill.hi; ++s)
    if (rng.uniform(s, 0) <= rho) occupied.push_back(s);
  if (occupied.empty()) throw BoundaryError("init_stationary: window holds no particle");
  return TasepState(std::move(occupied), SiteWindow{fill.lo, fill.hi + runway}, false);
}

//---------------------------------------------------------------------------//
// Tandem queues
//---------------------------------------------------------------------------//

TandemQueues::TandemQueues(std::vector<std::pair<std::int64_t, std::int64_t>> customers) {
  for (const auto& [label, queue] : customers) {
    if (!customers_.emplace(label, Customer{queue, queue, {}}).second)
      throw ParameterError("TandemQueues: duplicate customer label");
    queues_[queue].insert(label);
  }
  // Labels must decrease toward the front of the line.
  std::int64_t prev_queue = std::numeric_limits<std::int64_t>::max();
  for (const auto& [label, c] : customers_) {
    if (c.queue > prev_queue)
      throw ParameterError("TandemQueues: a customer is ahead of a smaller label");
    prev_queue = c.queue;
  }
}

TandemQueues TandemQueues::from_tasep(const TasepState& state) {
  std::vector<std::pair<std::int64_t, std::int64_t>> customers;
  for (std::int64_t n = state.label_lo(); n <= state.label_hi(); ++n)
    customers.emplace_back(n, state.initial_position(n) + n);
  return TandemQueues(std::move(customers));
}

void TandemQueues::start_service(std::int64_t q, double from, const WaitingTimes& omega) {
  auto it = queues_.find(q);
  if (it == queues_.end() || it->second.empty()) return;
  const std::int64_t head = *it->second.begin();
  push_event(heap_, from + omega(q + 1, head), q);
}

void TandemQueues::evolve(const WaitingTimes& omega, double t_end) {
  if (t_end < time_) throw ParameterError("TandemQueues::evolve: t_end precedes the current time");
  if (!started_) {
    std::vector<std::int64_t> busy;
    for (const auto& [q, members] : queues_)
      if (!members.empty()) busy.push_back(q);
    for (std::int64_t q : busy) start_service(q, 0.0, omega);
    started_ = true;
  }
  while (!heap_.empty() && heap_.front().first <= t_end) {
    const auto [t, q] = pop_event(heap_);
    auto& line = queues_[q];
    const std::int64_t head = *line.begin();
    line.erase(line.begin());
    Customer& c = customers_.at(head);
    c.exits.push_back(t);
    c.queue = q + 1;
    auto& next_line = queues_[q + 1];
    next_line.insert(head);
    // A customer arriving at an idle server starts service at once.
    if (*next_line.begin() == head && next_line.size() == 1) start_service(q + 1, t, omega);
    if (!line.empty()) start_service(q, t, omega);
  }
  time_ = t_end;
}

std::int64_t TandemQueues::queue_of(std::int64_t j) const {
  auto it = customers_.find(j);
  if (it == customers_.end()) throw DomainError("TandemQueues: unknown customer");
  return it->second.queue;
}

std::int64_t TandemQueues::queue_length(std::int64_t q) const {
  auto it = queues_.find(q);
  return it == queues_.end() ? 0 : static_cast<std::int64_t>(it->second.size());
}

std::optional<double> TandemQueues::exit_time(std::int64_t j, std::int64_t i) const {
  auto it = customers_.find(j);
  if (it == customers_.end()) throw DomainError("TandemQueues: unknown customer");
  const std::int64_t k = i - it->second.q0;
  if (k < 0 || k >= static_cast<std::int64_t>(it->second.exits.size())) return std::nullopt;
  return it->second.exits[static_cast<std::size_t>(k)];
}

std::optional<double> queue_exit_time(const TandemQueues& history, std::int64_t j,
                                      std::int64_t i) {
  return history.exit_time(j, i);
}

//---------------------------------------------------------------------------//
// Bridge
//---------------------------------------------------------------------------//

double domain_last_passage(const TasepState& initial, const WaitingTimes& omega, std::int64_t x,
                           std::int64_t y) {
  if (!initial.has_label(y)) throw DomainError("domain_last_passage: no particle with label y");
  const std::int64_t j0 = initial.label_lo();
  // prev[i - lo] holds L(i, j - 1); cells outside D read as 0.
  std::int64_t prev_lo = x + 1;  // empty row
  std::vector<double> prev;
  std::vector<double> cur;
  for (std::int64_t j = j0; j <= y; ++j) {
    const std::int64_t lo = initial.initial_position(j) + j + 1;
    cur.assign(lo <= x ? static_cast<std::size_t>(x - lo + 1) : 0, 0.0);
    for (std::int64_t i = lo; i <= x; ++i) {
      const double left = i > lo ? cur[static_cast<std::size_t>(i - 1 - lo)] : 0.0;
      const double down = i >= prev_lo ? prev[static_cast<std::size_t>(i - prev_lo)] : 0.0;
      cur[static_cast<std::size_t>(i - lo)] = omega(i, j) + (left >= down ? left : down);
    }
    prev.swap(cur);
    prev_lo = lo;
  }
  return x >= prev_lo ? prev[static_cast<std::size_t>(x - prev_lo)] : 0.0;
}

BridgeReport lpp_bridge_check(SeedSpec seed, std::int64_t x, std::int64_t y,
                              std::span<const double> t_grid) {
  BridgeReport report;
  if (x < 1 || y < 1) throw DomainError("lpp_bridge_check: x and y must be at least 1");
  // Site 0 empty, site 1 occupied, Bernoulli(1/2) elsewhere. The window
  // extends left until particle y exists, and right far enough that every
  // site a relevant particle can reach before passing x lies inside.
  const CounterRng rng(seed, StreamTag::kOccupation);
  std::vector<std::int64_t> occupied{1};
  std::int64_t left_count = 0;
  std::int64_t s = -1;
  while (left_count < y + 2) {
    if (rng.uniform(s, 0) <= 0.5) {
      occupied.push_back(s);
      ++left_count;
    }
    --s;
  }
  const std::int64_t fill_hi = x + 2;
  std::int64_t right_count = 0;
  for (std::int64_t site = 2; site <= fill_hi; ++site)
    if (rng.uniform(site, 0) <= 0.5) {
      occupied.push_back(site);
      ++right_count;
    }
  // Particle j reaches sites up to x - j (the rightmost label is -right_count),
  // and no particle may leave before the last query time: a departed particle
  // would stop blocking in the TASEP but not in the queues.
  const double t_max = t_grid.empty() ? 0.0 : *std::max_element(t_grid.begin(), t_grid.end());
  const std::int64_t site_max = std::max(x + right_count + 2, fill_hi + runway_for(t_max));
  const std::int64_t site_min = *std::min_element(occupied.begin(), occupied.end());
  TasepState tasep(occupied, SiteWindow{site_min, site_max}, false);
  const TasepState initial = tasep;
  TandemQueues queues = TandemQueues::from_tasep(tasep);
  const WaitingTimes omega(seed);

  const double L = domain_last_passage(initial, omega, x, y);

  std::vector<double> times(t_grid.begin(), t_grid.end());
  std::sort(times.begin(), times.end());
  auto fail = [&](double t, const std::string& what) {
    if (!report.ok) return;
    report.ok = false;
    std::ostringstream os;
    os.precision(17);
    os << "seed=(" << seed.master_seed << "," << seed.sample_index << ") x=" << x << " y=" << y
       << " t=" << t << ": " << what << " [L=" << L << "]";
    report.witness = os.str();
  };
  for (double t : times) {
    tasep.evolve(omega, t);
    queues.evolve(omega, t);
    const bool particle = tasep.exited(y) || tasep.position(y) >= x - y;
    const bool passage = L <= t;
    const auto exit = queues.exit_time(y, x - 1);
    const bool queue = queues.queue_of(y) >= x;
    const bool exit_event = (x - 1 < initial.initial_position(y) + y) || (exit && *exit <= t);
    const bool height = tasep.height(x - y - 1) >= x + y - 1;
    ++report.checks;
    if (particle != passage) fail(t, "particle event disagrees with last passage");
    if (particle != queue) fail(t, "particle event disagrees with queue index");
    if (particle != exit_event) fail(t, "particle event disagrees with queue exit time");
    if (particle != height) fail(t, "particle event disagrees with height function");
    for (std::int64_t j = tasep.label_lo(); j <= tasep.label_hi(); ++j) {
      if (tasep.exited(j)) continue;
      if (tasep.position(j) != queues.queue_of(j) - j) {
        fail(t, "x_j != Q_j - j for j=" + std::to_string(j));
        break;
      }
    }
  }
  return report;
}

}  // namespace kpz
