// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "quasifree/correlations.hpp"
#include "quasifree/error.hpp"
#include "quasifree/rng.hpp"
#include "quasifree/samplers.hpp"

namespace qf = quasifree;
using std::numbers::pi;

namespace {

qf::Kernel sine_kernel() {
  return qf::Kernel(qf::MomentumDensity(qf::ZeroTemperature{pi}, 1, qf::Statistics::fermion));
}

qf::Kernel bose_kernel() {
  return qf::Kernel(qf::MomentumDensity(qf::Bose{1.0 / (4.0 * pi), 0.5}, 1, qf::Statistics::boson));
}

TEST(PointTuple, Validation) {
  EXPECT_THROW(qf::PointTuple(0, {1.0}), qf::ParameterError);
  EXPECT_THROW(qf::PointTuple(2, {1.0, 2.0, 3.0}), qf::ParameterError);
  EXPECT_THROW(qf::PointTuple(1, {}), qf::ParameterError);
  EXPECT_THROW(qf::PointTuple(1, {NAN}), qf::ParameterError);
  const qf::PointTuple p(2, {1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(p.size(), 2u);
  EXPECT_EQ(p.point(1)[0], 3.0);
}

TEST(DetCorrelation, SineKernelExamples) {
  const auto k = sine_kernel();
  EXPECT_NEAR(qf::det_correlation(k, qf::PointTuple(1, {3.7})).value, 1.0, 1e-14);
  EXPECT_EQ(qf::det_correlation(k, qf::PointTuple(1, {2.0, 2.0})).value, 0.0);
  const auto v = qf::det_correlation(k, qf::PointTuple(1, {1.0, 1.5}));
  EXPECT_NEAR(v.value, 1.0 - 4.0 / (pi * pi), 1e-12);
  EXPECT_NEAR(v.value, 0.59471526543064891, 1e-12);
  EXPECT_EQ(v.order, 2);
}

TEST(DetCorrelation, RejectsBosonKernel) {
  EXPECT_THROW((void)qf::det_correlation(bose_kernel(), qf::PointTuple(1, {0.0})), qf::ParameterError);
  EXPECT_THROW((void)qf::det_correlation(sine_kernel(), qf::PointTuple(2, {0.0, 0.0})),
               qf::ParameterError);
}

TEST(DetCorrelation, BoundViolationIsReported) {
  qf::ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, 1.0;
  EXPECT_THROW((void)qf::det_correlation(m, 0.5), qf::ConsistencyError);
  m << 0.5, 0.7, 0.7, 0.5;
  EXPECT_THROW((void)qf::det_correlation(m, 1.0), qf::ConsistencyError);
}

TEST(PerCorrelation, BoseKernelExamples) {
  const auto k = bose_kernel();
  const double k0 = k.kappa0();
  EXPECT_NEAR(qf::per_correlation(k, qf::PointTuple(1, {1.0})).value, k0, 1e-14);
  const double kr = k.at_radius(0.8);
  EXPECT_NEAR(qf::per_correlation(k, qf::PointTuple(1, {0.2, 1.0})).value, k0 * k0 + kr * kr, 1e-12);

  qf::Philox4x32 g(4);
  for (int trial = 0; trial < 10; ++trial) {
    const qf::PointTuple pts(1, {3.0 * g.uniform(), 3.0 * g.uniform(), 3.0 * g.uniform()});
    const qf::RealMatrix m = qf::kernel_matrix(k, pts);
    EXPECT_NEAR(qf::per_correlation(k, pts).value, oracle::naive_permanent(m), 1e-12);
  }
}

TEST(Bounds, HadamardAndPermanentCaps) {
  const auto k = sine_kernel();
  EXPECT_NEAR(qf::hadamard_bound(k, 1), k.kappa0(), 1e-12);
  EXPECT_NEAR(qf::hadamard_bound(k, 2), 2.0, 1e-12);
  EXPECT_NEAR(qf::permanent_bound(0.5, 3), 6.0 * 0.125, 1e-15);
}

TEST(Bounds, RandomTuplesStayInsideCap) {
  const qf::Kernel k(qf::MomentumDensity(qf::ZeroTemperature{1.3}, 2, qf::Statistics::fermion));
  qf::Philox4x32 g(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5;
    std::vector<double> xs;
    for (int i = 0; i < 2 * n; ++i) xs.push_back(4.0 * g.uniform());
    const auto v = qf::det_correlation(k, qf::PointTuple(2, xs));
    EXPECT_GE(v.value, 0.0);
    EXPECT_LE(v.value, qf::hadamard_bound(k, n));
  }
}

TEST(RawMoments, FactorialToRawLowOrders) {
  // integral(e) = c^{b} prod e_j : exercises the partition bookkeeping.
  const auto integral = [](std::span<const int> e) {
    double v = 1.0;
    for (int x : e) v *= 2.0 * x;
    return v;
  };
  const auto raw = qf::factorial_to_raw(integral, 3);
  ASSERT_EQ(raw.size(), 3u);
  EXPECT_DOUBLE_EQ(raw[0], 2.0);
  EXPECT_DOUBLE_EQ(raw[1], 4.0 + 4.0);                    // {1}{2} + {12}
  EXPECT_DOUBLE_EQ(raw[2], 8.0 + 3.0 * 2.0 * 4.0 + 6.0);  // 3 singletons, 3 pairs, 1 triple
}

TEST(RawMoments, FermionVarianceBelowPoisson) {
  const auto k = sine_kernel();
  const qf::GridDiscretization grid(qf::Window({10.0}), {200});
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.center(i)[0];
    w[i] = std::exp(-0.5 * (x - 5.0) * (x - 5.0));
  }
  const auto raw = qf::raw_moments(k, grid.centers(), grid.cell_volume(), w, 2);
  double poisson = 0.0;
  for (double v : w) poisson += v * v * grid.cell_volume() * k.kappa0();
  EXPECT_LT(raw[1] - raw[0] * raw[0], poisson);
  EXPECT_GT(raw[1] - raw[0] * raw[0], 0.0);
}

TEST(RawMoments, MatchMonteCarlo) {
  const auto k = sine_kernel();
  const qf::GridDiscretization grid(qf::Window({6.0}), {192});
  const auto dk = qf::discretize_kernel(k, grid);
  const auto f = [](double x) { return std::exp(-0.5 * (x - 3.0) * (x - 3.0)); };
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) w[i] = f(grid.center(i)[0]);
  const auto raw = qf::raw_moments(k, grid.centers(), grid.cell_volume(), w, 2);

  constexpr int kReplicas = 4000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int r = 0; r < kReplicas; ++r) {
    const auto c = qf::sample_fermion(dk, 2026, static_cast<std::uint64_t>(r));
    double t = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) t += f(c.point(i)[0]);
    s1 += t;
    s2 += t * t;
    s4 += t * t * t * t;
  }
  const double m1 = s1 / kReplicas, m2 = s2 / kReplicas;
  const double se1 = std::sqrt((m2 - m1 * m1) / kReplicas);
  const double se2 = std::sqrt((s4 / kReplicas - m2 * m2) / kReplicas);
  EXPECT_LE(std::abs(m1 - raw[0]), 3.0 * se1 + 1e-3);
  EXPECT_LE(std::abs(m2 - raw[1]), 3.0 * se2 + 1e-3);
}

}  // namespace
