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

#include "kpz/limit_law.hpp"
#include "kpz/special_functions.hpp"

namespace {

void BM_AiryAi(benchmark::State& state) {
  double x = -10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kpz::airy_ai(x));
    x = x > 10.0 ? -10.0 : x + 0.0137;
  }
}
BENCHMARK(BM_AiryAi);

void BM_FredholmDet(benchmark::State& state) {
  std::vector<double> taus, s;
  for (std::int64_t k = 0; k < state.range(0); ++k) {
    taus.push_back(double(k));
    s.push_back(0.0);
  }
  const kpz::MultiPointSpec spec(taus, s);
  for (auto _ : state) benchmark::DoNotOptimize(kpz::fredholm_det(spec));
}
BENCHMARK(BM_FredholmDet)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_LimitCdf(benchmark::State& state) {
  const kpz::MultiPointSpec spec({0.0}, {0.0});
  for (auto _ : state) benchmark::DoNotOptimize(kpz::limit_cdf(spec).cdf);
}
BENCHMARK(BM_LimitCdf)->Unit(benchmark::kMillisecond);

}  // namespace
