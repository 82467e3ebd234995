// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "qdc/channel.hpp"
#include "qdc/decoupling.hpp"
#include "qdc/entropy.hpp"
#include "qdc/haar.hpp"

namespace {

using namespace qdc;

// Conditional min-entropy is one SDP solve; range(0) is |A| = |E|.
void BM_HMinSdp(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  auto rng = make_rng(RngSeed{1, "bench-hmin"}, 0);
  const StateOperator s(DimsLabel({{"A", d}, {"E", d}}), random_density(d * d, d * d, rng));
  for (auto _ : st) benchmark::DoNotOptimize(h_min(s, {"A"}, {"E"}).value);
}
BENCHMARK(BM_HMinSdp)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_HaarUnitary(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  auto rng = make_rng(RngSeed{2, "bench-haar"}, 0);
  for (auto _ : st) benchmark::DoNotOptimize(haar_unitary(d, rng));
}
BENCHMARK(BM_HaarUnitary)->RangeMultiplier(4)->Range(2, 128);

// U on the leading factor of a d x 16 operator.
void BM_ConjugateLeading(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  auto rng = make_rng(RngSeed{3, "bench-conj"}, 0);
  const CMatrix m = random_density(d * 16, d * 16, rng);
  const CMatrix u = haar_unitary(d, rng);
  for (auto _ : st) benchmark::DoNotOptimize(conjugate_leading(m, u));
}
BENCHMARK(BM_ConjugateLeading)->RangeMultiplier(2)->Range(2, 16);

// One decoupling sample: rotate, apply the channel, trace distance to the product.
void BM_DecouplingSample(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  auto rng = make_rng(RngSeed{4, "bench-sample"}, 0);
  const StateOperator s(DimsLabel({{"A", d}, {"E", d}}), random_density(d * d, d * d, rng));
  const Channel ch = random_tpcpm(d, d, 2, rng);
  for (auto _ : st) {
    const CMatrix u = haar_unitary(d, rng);
    benchmark::DoNotOptimize(sample_distance(s, {"A"}, ch, u));
  }
}
BENCHMARK(BM_DecouplingSample)->RangeMultiplier(2)->Range(2, 8);

}  // namespace

BENCHMARK_MAIN();
