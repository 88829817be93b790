// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <array>
#include <set>

#include "oracles.hpp"
#include "quasifree/error.hpp"
#include "quasifree/linalg.hpp"
#include "quasifree/rng.hpp"

namespace qf = quasifree;

namespace {

TEST(Philox, KnownAnswer) {
  // Philox4x32-10 reference vector for a zero key and zero counter.
  const qf::Philox4x32 g(0, 0);
  const std::array<std::uint32_t, 4> expected{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
  EXPECT_EQ(g.generate(0), expected);
}

TEST(Philox, StreamsAreIndependentOfConsumption) {
  qf::Philox4x32 a(42, qf::replica_stream(7, 1));
  qf::Philox4x32 noise(42, qf::replica_stream(6, 1));
  for (int i = 0; i < 1000; ++i) (void)noise();
  qf::Philox4x32 b(42, qf::replica_stream(7, 1));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  qf::Philox4x32 c(42, qf::replica_stream(8, 1));
  qf::Philox4x32 d(42, qf::replica_stream(7, 1));
  int same = 0;
  for (int i = 0; i < 100; ++i) same += c() == d();
  EXPECT_LT(same, 3);
}

TEST(Philox, UniformRange) {
  qf::Philox4x32 g(3);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Permanent, RyserMatchesNaive) {
  qf::Philox4x32 g(17);
  for (int n = 1; n <= 7; ++n) {
    qf::ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = qf::Complex(g.uniform() - 0.5, g.uniform() - 0.5);
    }
    const qf::Complex naive = oracle::naive_permanent(a);
    EXPECT_LE(std::abs(qf::permanent(a) - naive), 1e-12 * std::max(1.0, std::abs(naive))) << n;
    const qf::Complex det = oracle::naive_determinant(a);
    EXPECT_LE(std::abs(qf::determinant(a) - det), 1e-12 * std::max(1.0, std::abs(det))) << n;
  }
}

TEST(Permanent, KnownValues) {
  EXPECT_DOUBLE_EQ(qf::permanent(qf::RealMatrix(qf::RealMatrix::Ones(4, 4))), 24.0);
  EXPECT_DOUBLE_EQ(qf::permanent(qf::RealMatrix(qf::RealMatrix::Identity(5, 5))), 1.0);
  EXPECT_DOUBLE_EQ(qf::permanent(qf::RealMatrix(0, 0)), 1.0);
  EXPECT_THROW((void)qf::permanent(qf::RealMatrix(qf::RealMatrix::Zero(31, 31))), qf::SizeError);
}

TEST(HermitianFunction, ClampsAndRejects) {
  qf::ComplexMatrix a(2, 2);
  a << 1.0 + 1e-13, 0.0, 0.0, 0.25;
  const auto sq = qf::hermitian_function(a, [](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10);
  EXPECT_NEAR(sq(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(sq(1, 1).real(), 0.5, 1e-15);
  a(0, 0) = 1.1;
  EXPECT_THROW((void)qf::hermitian_function(a, [](double x) { return x; }, 0.0, 1.0, 1e-10),
               qf::ConstraintViolation);
}

}  // namespace
