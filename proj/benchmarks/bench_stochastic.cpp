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
#include <benchmark/benchmark.h>

#include <vector>

#include "kpz/stochastic.hpp"

namespace {

void BM_Philox(benchmark::State& state) {
  kpz::PhiloxCounter c{};
  const kpz::PhiloxKey k{0x12345678u, 0x9abcdef0u};
  for (auto _ : state) {
    c = kpz::philox4x32_10(c, k);
    benchmark::DoNotOptimize(c);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Philox);

void BM_FillRow(benchmark::State& state) {
  const kpz::WeightOracle oracle(kpz::ModelParams::two_sided_stationary(0.5), {1, 0});
  std::vector<double> row(static_cast<std::size_t>(state.range(0)));
  std::int64_t j = 1;
  for (auto _ : state) {
    oracle.fill_row(j++, 0, row);
    benchmark::DoNotOptimize(row.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FillRow)->Arg(256)->Arg(4096);

}  // namespace
