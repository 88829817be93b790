// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "quasifree/algebra.hpp"

namespace qf = quasifree;

namespace {

void BM_FermionFock(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto k = qf::KMatrix::random(m, qf::Statistics::fermion, 5);
  const qf::FermionFockSpace space(m);
  for (auto _ : state) benchmark::DoNotOptimize(qf::build_fermion_fields(k, space));
}
BENCHMARK(BM_FermionFock)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_BosonFock(benchmark::State& state) {
  const int cutoff = static_cast<int>(state.range(0));
  const auto k = qf::KMatrix::random(2, qf::Statistics::boson, 5, 0.5);
  const qf::BosonFockSpace space(2, cutoff);
  for (auto _ : state) benchmark::DoNotOptimize(qf::build_boson_fields(k, space));
}
BENCHMARK(BM_BosonFock)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

}  // namespace
