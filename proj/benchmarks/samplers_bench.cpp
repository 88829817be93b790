// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <numbers>

#include "quasifree/samplers.hpp"

namespace qf = quasifree;
using std::numbers::pi;

namespace {

// Projection sampling on a 1D window of length L, density 1.
void BM_FermionSample(benchmark::State& state) {
  const auto cells = static_cast<int>(state.range(0));
  const qf::Kernel k(qf::MomentumDensity(qf::ZeroTemperature{pi}, 1, qf::Statistics::fermion));
  const auto dk = qf::discretize_kernel(k, qf::GridDiscretization(qf::Window({10.0}), {cells}));
  std::uint64_t replica = 0;
  for (auto _ : state) benchmark::DoNotOptimize(qf::sample_fermion(dk, 1, replica++));
}
BENCHMARK(BM_FermionSample)->RangeMultiplier(2)->Range(128, 1024);

void BM_Discretize(benchmark::State& state) {
  const auto cells = static_cast<int>(state.range(0));
  const qf::Kernel k(qf::MomentumDensity(qf::ZeroTemperature{pi}, 1, qf::Statistics::fermion));
  const qf::GridDiscretization grid(qf::Window({10.0}), {cells});
  for (auto _ : state) benchmark::DoNotOptimize(qf::discretize_kernel(k, grid));
}
BENCHMARK(BM_Discretize)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

void BM_CoxSample(benchmark::State& state) {
  const auto cells = static_cast<int>(state.range(0));
  const qf::MomentumDensity bose(qf::Bose{1.0 / (4.0 * pi), 0.5}, 1, qf::Statistics::boson);
  const qf::CoxSampler sampler(bose, qf::GridDiscretization(qf::Window({10.0}), {cells}));
  std::uint64_t replica = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(1, replica++));
}
BENCHMARK(BM_CoxSample)->RangeMultiplier(2)->Range(128, 1024);

}  // namespace
