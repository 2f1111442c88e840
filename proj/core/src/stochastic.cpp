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

#include <cmath>

#include "kpz/errors.hpp"
#include "kpz/stochastic.hpp"

namespace kpz {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t join(std::uint32_t hi, std::uint32_t lo) noexcept {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  return c;
}

CounterRng::CounterRng(SeedSpec seed, StreamTag tag) noexcept {
  const std::uint64_t mixed =
      splitmix64(seed.master_seed ^ splitmix64(static_cast<std::uint64_t>(tag)));
  key_ = {static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)};
  sample_lo_ = static_cast<std::uint32_t>(seed.sample_index);
  sample_hi_ = static_cast<std::uint32_t>(seed.sample_index >> 32);
}

PhiloxCounter CounterRng::block(std::int64_t i, std::int64_t j) const noexcept {
  return philox4x32_10({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                        sample_lo_, sample_hi_},
                       key_);
}

PhiloxCounter CounterRng::block_at(std::uint64_t position) const noexcept {
  // Sequential positions flip the top bit of the sample word so they do not
  // reuse the counters of lattice cells under the same tag.
  return philox4x32_10({static_cast<std::uint32_t>(position),
                        static_cast<std::uint32_t>(position >> 32), sample_lo_,
                        sample_hi_ ^ 0x80000000u},
                       key_);
}

double CounterRng::uniform(std::int64_t i, std::int64_t j) const noexcept {
  const PhiloxCounter r = block(i, j);
  return unit_open_zero(join(r[0], r[1]));
}

CounterStream::CounterStream(SeedSpec seed, StreamTag tag) noexcept : rng_(seed, tag) {}

std::uint64_t CounterStream::next_u64() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const PhiloxCounter r = rng_.block_at(position_++);
  spare_ = join(r[2], r[3]);
  has_spare_ = true;
  return join(r[0], r[1]);
}

CounterStream stream_for(std::uint64_t master_seed, std::uint64_t index,
                         StreamTag tag) noexcept {
  return CounterStream(SeedSpec{master_seed, index}, tag);
}

double sample_exp(CounterStream& stream, double mean) {
  if (!(mean > 0.0)) throw ParameterError("sample_exp: mean must be positive");
  return exp_from_uniform(stream.uniform(), mean);
}

std::uint64_t sample_geom(CounterStream& stream, double q) {
  if (!(q >= 0.0 && q < 1.0)) throw ParameterError("sample_geom: q must lie in [0, 1)");
  if (q == 0.0) return 0;
  // P(X >= k) = q^k  <=>  X = floor(ln U / ln q)
  return static_cast<std::uint64_t>(std::floor(std::log(stream.uniform()) / std::log(q)));
}

//---------------------------------------------------------------------------//

ModelParams ModelParams::two_sided_stationary(double rho) {
  ModelParams p{ModelKind::kTwoSidedStationary, rho, rho - 0.5, 0.5 - rho};
  p.validate();
  return p;
}

ModelParams ModelParams::shifted_plus(double a, double b) {
  ModelParams p{ModelKind::kShiftedPlus, 0.5 + a, a, b};
  p.validate();
  return p;
}

ModelParams ModelParams::shifted_zero(double a, double b) {
  ModelParams p{ModelKind::kShiftedZero, 0.5 + a, a, b};
  p.validate();
  return p;
}

ModelParams ModelParams::bernoulli_domain(double rho) {
  ModelParams p{ModelKind::kBernoulliDomain, rho, rho - 0.5, 0.5 - rho};
  p.validate();
  return p;
}

ModelParams ModelParams::no_source() {
  ModelParams p{ModelKind::kNoSource, 0.5, 0.0, 0.0};
  p.validate();
  return p;
}

void ModelParams::validate() const {
  auto in_half_open = [](double v) { return v > -0.5 && v < 0.5; };
  switch (kind) {
    case ModelKind::kTwoSidedStationary:
    case ModelKind::kBernoulliDomain:
      if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("rho must lie in (0, 1)");
      if (a != rho - 0.5 || b != 0.5 - rho)
        throw ParameterError("stationary models force a = rho - 1/2, b = 1/2 - rho");
      break;
    case ModelKind::kShiftedPlus:
      if (!in_half_open(a) || !in_half_open(b))
        throw ParameterError("a and b must lie in (-1/2, 1/2)");
      if (!(a + b > 0.0)) throw ParameterError("shifted-plus model requires a + b > 0");
      break;
    case ModelKind::kShiftedZero:
      if (!in_half_open(a) || !in_half_open(b))
        throw ParameterError("a and b must lie in (-1/2, 1/2)");
      break;
    case ModelKind::kNoSource:
      if (a != 0.0 || b != 0.0) throw ParameterError("no-source model forces a = b = 0");
      break;
  }
}

double ModelParams::bottom_mean() const noexcept {
  return kind == ModelKind::kNoSource ? 0.0 : 1.0 / (0.5 + b);
}

double ModelParams::left_mean() const noexcept {
  return kind == ModelKind::kNoSource ? 0.0 : 1.0 / (0.5 + a);
}

double ModelParams::origin_mean() const noexcept {
  return kind == ModelKind::kShiftedPlus ? 1.0 / (a + b) : 0.0;
}

//---------------------------------------------------------------------------//

WeightOracle::WeightOracle(ModelParams params, SeedSpec seed, double quantum)
    : params_(params), seed_(seed), rng_(seed, StreamTag::kWeights), quantum_(quantum) {
  params_.validate();
  if (quantum < 0.0) throw ParameterError("weight quantum must be non-negative");
  if (params_.kind == ModelKind::kBernoulliDomain) {
    // zeta+ ~ Geom(1 - rho) and zeta- ~ Geom(rho), drawn independently.
    CounterStream boundary(seed, StreamTag::kBoundary);
    zeta_plus_ = static_cast<std::int64_t>(sample_geom(boundary, 1.0 - params_.rho));
    zeta_minus_ = static_cast<std::int64_t>(sample_geom(boundary, params_.rho));
  }
}

double WeightOracle::cell(std::int64_t i, std::int64_t j) const noexcept {
  double mean;
  if (i > 0 && j > 0) {
    mean = 1.0;
  } else if (i == 0 && j == 0) {
    mean = params_.origin_mean();
  } else if (j == 0) {
    if (i <= zeta_plus_) return 0.0;
    mean = params_.bottom_mean();
  } else {
    if (j <= zeta_minus_) return 0.0;
    mean = params_.left_mean();
  }
  if (mean == 0.0) return 0.0;
  double w = exp_from_uniform(rng_.uniform(i, j), mean);
  if (quantum_ > 0.0) w = std::floor(w / quantum_) * quantum_;
  return w;
}

double WeightOracle::weight_at(std::int64_t i, std::int64_t j) const {
  if (i < 0 || j < 0) throw DomainError("weight_at: negative lattice index");
  return cell(i, j);
}

void WeightOracle::fill_row(std::int64_t j, std::int64_t i_begin, std::span<double> out) const {
  if (j < 0 || i_begin < 0) throw DomainError("fill_row: negative lattice index");
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = cell(i_begin + static_cast<std::int64_t>(k), j);
}

}  // namespace kpz
