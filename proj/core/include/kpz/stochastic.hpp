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

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

namespace kpz {

//---------------------------------------------------------------------------//
// Counter-based randomness
//---------------------------------------------------------------------------//

/// Identifies one Monte Carlo sample: a run-wide seed plus the sample number.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t sample_index = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// Separates the independent random fields drawn from one SeedSpec.
enum class StreamTag : std::uint32_t {
  kWeights = 1,
  kWaitingTimes = 2,
  kBoundary = 3,
  kOccupation = 4,
  kQueues = 5,
  kGeneric = 6,
};

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// The Philox-4x32 block cipher with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Maps 64 random bits to a double uniform on (0, 1]; zero is never produced.
inline double unit_open_zero(std::uint64_t bits) noexcept {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Pure random field: uniform(i, j) depends only on (seed, tag, i, j).
///
/// Lattice indices are folded to 32 bits, so |i|, |j| must stay below 2^31.
class CounterRng {
 public:
  CounterRng(SeedSpec seed, StreamTag tag) noexcept;

  /// Uniform on (0, 1] attached to cell (i, j).
  double uniform(std::int64_t i, std::int64_t j) const noexcept;

  /// Raw 128-bit block attached to cell (i, j).
  PhiloxCounter block(std::int64_t i, std::int64_t j) const noexcept;

  /// Raw block at a 64-bit position (used by CounterStream).
  PhiloxCounter block_at(std::uint64_t position) const noexcept;

 private:
  PhiloxKey key_;
  std::uint32_t sample_lo_;
  std::uint32_t sample_hi_;
};

/// Sequential stream of uniforms, itself a thin cursor over a CounterRng.
class CounterStream {
 public:
  explicit CounterStream(SeedSpec seed, StreamTag tag = StreamTag::kGeneric) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on (0, 1].
  double uniform() noexcept { return unit_open_zero(next_u64()); }

 private:
  CounterRng rng_;
  std::uint64_t position_ = 0;
  std::uint64_t spare_ = 0;
  bool has_spare_ = false;
};

/// Stream number `index` under `master_seed`.
CounterStream stream_for(std::uint64_t master_seed, std::uint64_t index,
                         StreamTag tag = StreamTag::kGeneric) noexcept;

/// Exponential variate with the given EXPECTATION, by inverse CDF from u in (0, 1].
inline double exp_from_uniform(double u, double mean) noexcept {
  return -mean * std::log(u);
}

/// Exp variate with expectation `mean` (rate 1/mean). Throws ParameterError if mean <= 0.
double sample_exp(CounterStream& stream, double mean);

/// Geometric variate with P(X = k) = (1 - q) q^k, k >= 0. Throws if q is outside [0, 1).
std::uint64_t sample_geom(CounterStream& stream, double q);

//---------------------------------------------------------------------------//
// Weight models
//---------------------------------------------------------------------------//

enum class ModelKind {
  kTwoSidedStationary,  ///< w00 = 0, rows Exp(1/(1-rho)), columns Exp(1/rho)
  kShiftedPlus,         ///< origin Exp(1/(a+b)), a + b > 0
  kShiftedZero,         ///< same borders as kShiftedPlus, origin 0
  kBernoulliDomain,     ///< two-sided with the first zeta+/zeta- border cells zeroed
  kNoSource,            ///< borders identically zero
};

/// Which weight model, and its parameters. Expectations follow the
/// convention "Exp(r) has mean r": bottom row mean 1/(1/2 + b), left column
/// mean 1/(1/2 + a), origin mean 1/(a + b).
struct ModelParams {
  ModelKind kind = ModelKind::kTwoSidedStationary;
  double rho = 0.5;
  double a = 0.0;
  double b = 0.0;

  static ModelParams two_sided_stationary(double rho);
  static ModelParams shifted_plus(double a, double b);
  static ModelParams shifted_zero(double a, double b);
  static ModelParams bernoulli_domain(double rho);
  static ModelParams no_source();

  /// Throws ParameterError when the invariants of `kind` are violated.
  void validate() const;

  double bottom_mean() const noexcept;  ///< w(i, 0), i >= 1
  double left_mean() const noexcept;    ///< w(0, j), j >= 1
  double origin_mean() const noexcept;  ///< 0 unless kShiftedPlus
};

/// Deterministic map (i, j) -> weight for one sample.
///
/// Immutable after construction; safe to share across threads.
class WeightOracle {
 public:
  /// `quantum > 0` rounds every weight down to a multiple of `quantum`
  /// (dyadic quanta make all path sums exact in binary64).
  WeightOracle(ModelParams params, SeedSpec seed, double quantum = 0.0);

  const ModelParams& params() const noexcept { return params_; }
  const SeedSpec& seed() const noexcept { return seed_; }
  double quantum() const noexcept { return quantum_; }

  /// Number of leading bottom-row / left-column cells forced to zero
  /// (kBernoulliDomain only; zero otherwise).
  std::int64_t zeta_plus() const noexcept { return zeta_plus_; }
  std::int64_t zeta_minus() const noexcept { return zeta_minus_; }

  /// Throws DomainError for negative indices.
  double weight_at(std::int64_t i, std::int64_t j) const;

  /// Writes w(i_begin + k, j) into out[k]. Indices must be non-negative.
  void fill_row(std::int64_t j, std::int64_t i_begin, std::span<double> out) const;

 private:
  double cell(std::int64_t i, std::int64_t j) const noexcept;

  ModelParams params_;
  SeedSpec seed_;
  CounterRng rng_;
  double quantum_;
  std::int64_t zeta_plus_ = 0;
  std::int64_t zeta_minus_ = 0;
};

}  // namespace kpz
