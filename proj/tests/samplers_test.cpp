// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "quasifree/error.hpp"
#include "quasifree/samplers.hpp"

namespace qf = quasifree;
using std::numbers::pi;

namespace {

qf::MomentumDensity sine_density() {
  return qf::MomentumDensity(qf::ZeroTemperature{pi}, 1, qf::Statistics::fermion);
}

qf::MomentumDensity bose_density() {
  return qf::MomentumDensity(qf::Bose{1.0 / (4.0 * pi), 0.5}, 1, qf::Statistics::boson);
}

qf::MomentumDensity empty_density(qf::Statistics s) {
  return qf::MomentumDensity(qf::Tabulated{{0.0, 1.0}, {0.0, 0.0}}, 1, s);
}

TEST(Grid, Geometry) {
  const qf::GridDiscretization g(qf::Window({2.0, 3.0}), {4, 6});
  EXPECT_EQ(g.size(), 24u);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.25);
  EXPECT_DOUBLE_EQ(g.center(0)[0], 0.25);
  EXPECT_DOUBLE_EQ(g.center(7)[1], 0.75);
  EXPECT_EQ(g.multi_index(7), (std::vector<int>{1, 1}));
  EXPECT_THROW(qf::GridDiscretization(qf::Window({1.0}), {1}), qf::ParameterError);
  EXPECT_THROW(qf::Window({1.0, -2.0}), qf::ParameterError);
}

TEST(Discretize, TraceAndZeroDensity) {
  const qf::Kernel k(sine_density());
  const qf::GridDiscretization grid(qf::Window({10.0}), {512});
  const auto dk = qf::discretize_kernel(k, grid);
  EXPECT_NEAR(dk.matrix.trace(), k.kappa0() * 10.0, 1e-8);
  EXPECT_NEAR(dk.eigenvalues.sum(), 10.0, 1e-6);
  EXPECT_GE(dk.eigenvalues.minCoeff(), 0.0);
  EXPECT_LE(dk.eigenvalues.maxCoeff(), 1.0);
  int near_one = 0;
  for (double l : dk.eigenvalues) near_one += l > 0.5;
  EXPECT_NEAR(near_one, 10, 1);

  const qf::Kernel zero(empty_density(qf::Statistics::fermion));
  const auto dz = qf::discretize_kernel(zero, qf::GridDiscretization(qf::Window({4.0}), {16}));
  EXPECT_EQ(dz.matrix.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(dz.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
  for (std::uint64_t r = 0; r < 20; ++r) EXPECT_EQ(qf::sample_fermion(dz, 1, r).size(), 0u);
}

TEST(FermionSampler, DeterministicAndInsideWindow) {
  const qf::Kernel k(sine_density());
  const auto dk = qf::discretize_kernel(k, qf::GridDiscretization(qf::Window({10.0}), {256}));
  const auto a = qf::sample_fermion(dk, 77, 3);
  const auto b = qf::sample_fermion(dk, 77, 3);
  EXPECT_EQ(a.coordinates, b.coordinates);
  for (double x : a.coordinates) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 10.0);
  }
  const auto many1 = qf::sample_replicas(64, [&](std::uint64_t r) { return qf::sample_fermion(dk, 5, r); }, 1);
  const auto many4 = qf::sample_replicas(64, [&](std::uint64_t r) { return qf::sample_fermion(dk, 5, r); }, 4);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(many1[i].coordinates, many4[i].coordinates);
}

TEST(FermionSampler, CountMeanAndIntensity) {
  const qf::Kernel k(sine_density());
  const auto dk = qf::discretize_kernel(k, qf::GridDiscretization(qf::Window({10.0}), {256}));
  const auto configs =
      qf::sample_replicas(4000, [&](std::uint64_t r) { return qf::sample_fermion(dk, 2026, r); });
  // The count is a sum of independent Bernoulli(lambda_j).
  double variance = 0.0;
  for (double l : dk.eigenvalues) variance += l * (1.0 - l);
  const auto est = qf::estimate_intensity(configs, qf::Window({10.0}), {5});
  EXPECT_LE(std::abs(est.count_mean - dk.eigenvalues.sum()), 3.0 * std::sqrt(variance / 4000) + 1e-9);
  for (const auto& bin : est.bins) EXPECT_LE(std::abs(bin.value - 1.0), 3.0 * bin.standard_error);
  EXPECT_LT(est.count_variance, est.count_mean);
}

TEST(FermionSampler, RejectsBosonKernel) {
  const qf::Kernel k(bose_density());
  const auto dk = qf::discretize_kernel(k, qf::GridDiscretization(qf::Window({5.0}), {32}));
  EXPECT_THROW((void)qf::sample_fermion(dk, 1), qf::ParameterError);
}

TEST(CoxSampler, FieldVarianceMatchesKappa0) {
  const qf::Kernel k(bose_density());
  const qf::CoxSampler sampler(bose_density(), qf::GridDiscretization(qf::Window({10.0}), {64}));
  EXPECT_NEAR(sampler.spectral_variance(), k.kappa0(), 1e-6);
  constexpr int kDraws = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < kDraws; ++r) {
    const double v = std::norm(sampler.field(9, static_cast<std::uint64_t>(r))(20));
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / kDraws;
  const double se = std::sqrt((sum2 / kDraws - mean * mean) / kDraws);
  EXPECT_LE(std::abs(mean - k.kappa0()), 3.0 * se);
}

TEST(CoxSampler, EmptyDensityGivesEmptyConfigurations) {
  const qf::GridDiscretization grid(qf::Window({4.0}), {16});
  for (std::uint64_t r = 0; r < 10; ++r) {
    EXPECT_EQ(qf::sample_boson(empty_density(qf::Statistics::boson), grid, 3, r).size(), 0u);
  }
}

TEST(CoxSampler, PairCorrelationShowsBunching) {
  const qf::Kernel k(bose_density());
  const qf::Window w({10.0});
  const qf::CoxSampler sampler(bose_density(), qf::GridDiscretization(w, {512}));
  const auto configs = qf::sample_replicas(3000, [&](std::uint64_t r) { return sampler.sample(11, r); });
  const std::vector<double> edges{0.0, 0.1, 0.2, 0.4, 0.8, 1.6, 2.5};
  const auto g2 = qf::estimate_pair_correlation(configs, w, edges, k.kappa0());
  for (const auto& bin : g2.bins) {
    ASSERT_FALSE(bin.empty);
    const double mid = 0.5 * (bin.lower + bin.upper);
    const double ratio = k.at_radius(mid) / k.kappa0();
    // Loose check against the midpoint value; the acceptance run pins the bin averages.
    EXPECT_NEAR(bin.value, 1.0 + ratio * ratio, 4.0 * bin.standard_error + 0.03) << mid;
  }
  EXPECT_GT(g2.bins.front().value, 1.8);
  EXPECT_LT(std::abs(g2.bins.back().value - 1.0), 0.1);
}

TEST(Estimators, EmptyReplicas) {
  const std::vector<qf::Configuration> configs(5, qf::Configuration{1, {}});
  const auto est = qf::estimate_intensity(configs, qf::Window({3.0}), {3});
  for (const auto& bin : est.bins) EXPECT_EQ(bin.value, 0.0);
  EXPECT_EQ(est.mean, 0.0);
  const std::vector<double> edges{0.0, 0.5, 1.0};
  const auto g2 = qf::estimate_pair_correlation(configs, qf::Window({3.0}), edges, 1.0);
  for (const auto& bin : g2.bins) {
    EXPECT_TRUE(bin.empty);
    EXPECT_TRUE(std::isnan(bin.value));
  }
  EXPECT_THROW((void)qf::estimate_intensity(std::span(configs).first(1), qf::Window({3.0}), {3}),
               qf::ParameterError);
}

TEST(Estimators, PeriodicNeedsHalfWindow) {
  const std::vector<qf::Configuration> configs(3, qf::Configuration{1, {1.0, 2.0}});
  const std::vector<double> edges{0.0, 3.0};
  EXPECT_THROW((void)qf::estimate_pair_correlation(configs, qf::Window({4.0}), edges, std::nullopt,
                                                   qf::EdgeCorrection::periodic),
               qf::ParameterError);
  EXPECT_EQ(qf::parse_edge_correction("periodic"), qf::EdgeCorrection::periodic);
}

TEST(Geometry, UnitBallVolume) {
  EXPECT_DOUBLE_EQ(qf::unit_ball_volume(1), 2.0);
  EXPECT_NEAR(qf::unit_ball_volume(2), pi, 1e-15);
  EXPECT_NEAR(qf::unit_ball_volume(3), 4.0 * pi / 3.0, 1e-14);
}

}  // namespace
