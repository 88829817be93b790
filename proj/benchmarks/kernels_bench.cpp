// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <numbers>

#include "quasifree/kernels.hpp"

namespace qf = quasifree;

namespace {

void BM_KernelQuadrature(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const qf::MomentumDensity fd(qf::FermiDirac{1.0, 0.5, 1.0}, d, qf::Statistics::fermion);
  double r = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qf::kernel_from_density(fd, r));
    r = r < 8.0 ? r + 0.37 : 0.0;
  }
}
BENCHMARK(BM_KernelQuadrature)->DenseRange(1, 3);

void BM_KernelClosedForm(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const qf::Kernel k(qf::MomentumDensity(qf::ZeroTemperature{std::numbers::pi}, d, qf::Statistics::fermion),
                     qf::KernelMethod::closed_form);
  double r = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k.at_radius(r));
    r = r < 8.0 ? r + 0.37 : 0.0;
  }
}
BENCHMARK(BM_KernelClosedForm)->DenseRange(1, 3);

void BM_BoseSeries(benchmark::State& state) {
  const double beta = 1.0 / (4.0 * std::numbers::pi);
  double r = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qf::bose_kernel(r, beta, 0.5, 1));
    r = r < 8.0 ? r + 0.37 : 0.0;
  }
}
BENCHMARK(BM_BoseSeries);

}  // namespace
