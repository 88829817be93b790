// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "quasifree/error.hpp"
#include "quasifree/functionals.hpp"
#include "quasifree/rng.hpp"

namespace qf = quasifree;
using qf::Complex;
using std::numbers::pi;

namespace {

qf::Kernel sine_kernel() {
  return qf::Kernel(qf::MomentumDensity(qf::ZeroTemperature{pi}, 1, qf::Statistics::fermion));
}

qf::Kernel bose_kernel() {
  return qf::Kernel(qf::MomentumDensity(qf::Bose{1.0 / (4.0 * pi), 0.5}, 1, qf::Statistics::boson));
}

// Random symmetric matrix with spectrum in [0, top].
qf::RealMatrix random_psd(int n, double top, std::uint64_t seed) {
  qf::Philox4x32 g(seed);
  qf::RealMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = g.uniform() - 0.5;
  }
  const Eigen::HouseholderQR<qf::RealMatrix> qr(a);
  const qf::RealMatrix q = qr.householderQ();
  qf::RealVector l(n);
  for (int i = 0; i < n; ++i) l(i) = top * g.uniform();
  return q * l.asDiagonal() * q.transpose();
}

std::vector<Complex> phases(const std::vector<double>& f) {
  std::vector<Complex> u;
  for (double x : f) u.push_back(std::polar(1.0, x) - 1.0);
  return u;
}

TEST(TestFunction, ParseAndEvaluate) {
  const auto g = qf::TestFunction::parse("gaussian:center=5;width=2;amplitude=0.5");
  const std::vector<double> at{7.0};
  EXPECT_NEAR(g(at), 0.5 * std::exp(-0.5), 1e-15);
  EXPECT_DOUBLE_EQ(g.sup_abs(), 0.5);
  const auto box = qf::TestFunction::parse("indicator:lower=1,1;upper=2,3;amplitude=-0.3");
  EXPECT_EQ(box.dimension(), 2);
  const std::vector<double> in{1.5, 2.9}, out{2.0, 2.0};
  EXPECT_DOUBLE_EQ(box(in), -0.3);
  EXPECT_DOUBLE_EQ(box(out), 0.0);
  const auto tab = qf::TestFunction::parse("tabulated:extents=4;cells=4;values=0,0.2,0.4,0");
  const std::vector<double> x{2.5};
  EXPECT_DOUBLE_EQ(tab(x), 0.4);
  EXPECT_THROW((void)qf::TestFunction::parse("wave:center=1"), qf::ParameterError);
  EXPECT_THROW((void)qf::TestFunction::parse("gaussian:center=1;width=0"), qf::ParameterError);
  EXPECT_THROW((void)qf::TestFunction::parse("tabulated:extents=4;cells=4;values=0,1"), qf::ParameterError);
}

TEST(Series, ZeroFunctionIsOne) {
  const auto k = sine_kernel();
  const qf::GridDiscretization grid(qf::Window({10.0}), {128});
  const auto f = qf::TestFunction::gaussian({5.0}, 1.0, 0.0);
  const auto v = qf::characteristic_series(k, f, grid, 4);
  EXPECT_EQ(v.value, Complex(1.0));
  EXPECT_EQ(v.tail_bound, 0.0);
}

TEST(Series, FirstOrderIsKappa0TimesIntegral) {
  const auto k = sine_kernel();
  // Box edges on cell boundaries, so the cell sum is the exact integral.
  const qf::GridDiscretization grid(qf::Window({10.0}), {500});
  const auto f = qf::TestFunction::indicator({2.0}, {5.0}, 0.7);
  const auto v = qf::characteristic_series(k, f, grid, 1);
  const Complex expected = 1.0 + k.kappa0() * 3.0 * (std::polar(1.0, 0.7) - 1.0);
  EXPECT_LE(std::abs(v.value - expected), 1e-12);
}

TEST(Series, IncrementBelowTailBound) {
  const auto k = sine_kernel();
  const qf::GridDiscretization grid(qf::Window({10.0}), {256});
  const auto f = qf::TestFunction::gaussian({5.0}, 0.7, 0.2);
  const auto s3 = qf::characteristic_series(k, f, grid, 3);
  const auto s4 = qf::characteristic_series(k, f, grid, 4);
  EXPECT_LE(std::abs(s4.value - s3.value), s3.tail_bound);
  EXPECT_LE(std::abs(s4.value), 1.0 + 1e-8);
}

TEST(Series, RejectsBadOrder) {
  const auto k = sine_kernel();
  const qf::GridDiscretization grid(qf::Window({10.0}), {64});
  const auto f = qf::TestFunction::gaussian({5.0}, 1.0, 0.3);
  EXPECT_THROW((void)qf::characteristic_series(k, f, grid, qf::kMaxSeriesOrder + 1), qf::ParameterError);
  EXPECT_THROW((void)qf::characteristic_series(k, qf::TestFunction::gaussian({1.0, 1.0}, 1.0, 0.3), grid, 2),
               qf::ParameterError);
}

TEST(TailBounds, Values) {
  // c^5 5^{5/2} / 5! is the leading tail term for n_max = 4.
  EXPECT_GT(qf::fermion_tail_bound(0.5, 4), std::pow(0.5, 5) * std::pow(5.0, 2.5) / 120.0);
  EXPECT_LT(qf::fermion_tail_bound(0.5, 4), 2.0 * std::pow(0.5, 5) * std::pow(5.0, 2.5) / 120.0);
  EXPECT_NEAR(qf::boson_tail_bound(0.5, 2.0, 3), std::pow(0.5, 4) / 0.5, 1e-15);
  EXPECT_TRUE(std::isinf(qf::boson_tail_bound(1.5, 1.0, 3)));
  EXPECT_TRUE(std::isfinite(qf::boson_tail_bound(1.5, 0.3, 3)));
  EXPECT_EQ(qf::boson_tail_bound(0.0, 0.0, 3), 0.0);
}

TEST(Fredholm, ZeroFunctionAndRankOne) {
  const int n = 6;
  qf::RealVector v(n);
  for (int i = 0; i < n; ++i) v(i) = 0.1 * (i + 1);
  const double c = 0.8;
  const qf::RealMatrix m = c * v * v.transpose();
  const std::vector<double> zero(n, 0.0);
  EXPECT_EQ(qf::fredholm_value(m, zero, qf::Statistics::fermion).value, Complex(1.0));
  EXPECT_EQ(qf::fredholm_value(m, zero, qf::Statistics::boson).value, Complex(1.0));

  const std::vector<double> f{0.3, -0.2, 1.0, 0.0, 0.5, -0.9};
  const auto u = phases(f);
  Complex lemma = 0.0;
  for (int j = 0; j < n; ++j) lemma += u[static_cast<std::size_t>(j)] * v(j) * v(j);
  EXPECT_LE(std::abs(qf::fredholm_value(m, f, qf::Statistics::fermion).value - (1.0 + c * lemma)), 1e-14);
  EXPECT_LE(std::abs(qf::fredholm_value(m, f, qf::Statistics::boson).value - 1.0 / (1.0 - c * lemma)), 1e-14);
}

TEST(Fredholm, ExhaustiveEightCellFermion) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const qf::RealMatrix m = random_psd(8, 1.0, seed);
    qf::Philox4x32 g(seed + 100);
    std::vector<double> f(8);
    for (double& x : f) x = 4.0 * (g.uniform() - 0.5);
    const Complex expansion = oracle::subset_expansion(m, phases(f));
    EXPECT_LE(std::abs(qf::fredholm_value(m, f, qf::Statistics::fermion).value - expansion), 1e-10);
  }
}

TEST(Fredholm, BosonTupleExpansion) {
  const qf::RealMatrix m = random_psd(3, 0.3, 8);
  const std::vector<double> f{0.4, -0.6, 0.8};
  const auto u = phases(f);
  const int n_max = 7;
  double c = 0.0, umax = 0.0;
  for (int i = 0; i < 3; ++i) {
    c += std::abs(u[static_cast<std::size_t>(i)]) * m(i, i);
    umax = std::max(umax, std::abs(u[static_cast<std::size_t>(i)]));
  }
  const double a = umax * m.eigenvalues().real().maxCoeff();
  const Complex expansion = oracle::tuple_expansion(m, u, n_max);
  const double gap = std::abs(qf::fredholm_value(m, f, qf::Statistics::boson).value - expansion);
  EXPECT_LE(gap, qf::boson_tail_bound(c, a, n_max));
  EXPECT_LE(gap, 1e-4);
}

TEST(Fredholm, BosonDivergence) {
  const qf::RealMatrix m = 0.9 * qf::RealMatrix::Identity(4, 4);
  const std::vector<double> f(4, pi);  // |u| = 2
  EXPECT_THROW((void)qf::fredholm_value(m, f, qf::Statistics::boson), qf::DivergenceError);
}

TEST(Fredholm, ConjugateSymmetry) {
  const auto k = sine_kernel();
  const auto dk = qf::discretize_kernel(k, qf::GridDiscretization(qf::Window({10.0}), {256}));
  const auto f = qf::TestFunction::gaussian({4.0}, 1.0, 0.6);
  const auto plus = qf::fredholm_value(dk, f);
  const auto minus = qf::fredholm_value(dk, f.scaled(-1.0));
  EXPECT_LE(std::abs(plus.value - std::conj(minus.value)), 1e-12);
  EXPECT_LE(std::abs(plus.value), 1.0 + 1e-8);
}

TEST(Empirical, ZeroFunctionAndAgreement) {
  const auto k = sine_kernel();
  const auto dk = qf::discretize_kernel(k, qf::GridDiscretization(qf::Window({10.0}), {256}));
  const auto configs = qf::sample_replicas(3000, [&](std::uint64_t r) { return qf::sample_fermion(dk, 4, r); });
  const auto zero = qf::empirical_characteristic(configs, qf::TestFunction::gaussian({5.0}, 1.0, 0.0));
  EXPECT_EQ(zero.value, Complex(1.0));
  EXPECT_EQ(zero.error_estimate, 0.0);
  const auto f = qf::TestFunction::indicator({3.0}, {6.0}, 0.5);
  const auto emp = qf::empirical_characteristic(configs, f);
  const auto fred = qf::fredholm_value(dk, f);
  EXPECT_LE(std::abs(emp.value - fred.value), 3.0 * emp.error_estimate);
  const auto conj = qf::empirical_characteristic(configs, f.scaled(-1.0));
  EXPECT_LE(std::abs(emp.value - std::conj(conj.value)), 1e-12);
}

TEST(Empirical, BosonAgreement) {
  const auto k = bose_kernel();
  const qf::GridDiscretization grid(qf::Window({10.0}), {256});
  const qf::CoxSampler sampler(k.density(), grid);
  const auto configs = qf::sample_replicas(3000, [&](std::uint64_t r) { return sampler.sample(6, r); });
  const auto f = qf::TestFunction::gaussian({5.0}, 1.0, 0.4);
  const auto emp = qf::empirical_characteristic(configs, f);
  const auto fred = qf::fredholm_value(qf::discretize_kernel(k, grid), f);
  EXPECT_LE(std::abs(emp.value - fred.value), 3.0 * emp.error_estimate);
}

}  // namespace
