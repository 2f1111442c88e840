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

#include "kpz/lpp.hpp"

namespace {

void BM_LastPassageSweep(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  std::uint64_t sample = 0;
  for (auto _ : state) {
    const kpz::WeightOracle oracle(kpz::ModelParams::two_sided_stationary(0.5), {7, sample++});
    benchmark::DoNotOptimize(kpz::last_passage(oracle, kpz::PointSet({{n, n}})).at({n, n}));
  }
  state.SetItemsProcessed(state.iterations() * (n + 1) * (n + 1));
}
BENCHMARK(BM_LastPassageSweep)->Arg(64)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
