// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include "quasifree/linalg.hpp"

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "quasifree/error.hpp"

namespace quasifree {

namespace {

template <class Scalar, class Matrix>
Scalar ryser(const Matrix& a) {
  if (a.rows() != a.cols()) throw SizeError("permanent of a non-square matrix");
  const auto n = static_cast<int>(a.rows());
  if (n == 0) return Scalar(1);
  if (n > kMaxPermanentOrder) {
    throw SizeError("permanent order " + std::to_string(n) + " exceeds " +
                    std::to_string(kMaxPermanentOrder));
  }
  // Walk all column subsets in Gray-code order; row_sums[i] = sum_{j in S} a_ij.
  std::vector<Scalar> row_sums(static_cast<std::size_t>(n), Scalar(0));
  Scalar total(0);
  const std::uint64_t count = std::uint64_t{1} << n;
  std::uint64_t gray = 0;
  for (std::uint64_t k = 1; k < count; ++k) {
    const int col = std::countr_zero(k);
    const std::uint64_t bit = std::uint64_t{1} << col;
    gray ^= bit;
    const bool added = (gray & bit) != 0;
    Scalar prod(1);
    for (int i = 0; i < n; ++i) {
      auto& s = row_sums[static_cast<std::size_t>(i)];
      s = added ? s + a(i, col) : s - a(i, col);
      prod *= s;
    }
    // sign (-1)^{n - |S|}
    const bool odd = ((n - std::popcount(gray)) & 1) != 0;
    total = odd ? total - prod : total + prod;
  }
  return total;
}

}  // namespace

Complex permanent(const ComplexMatrix& a) { return ryser<Complex>(a); }
double permanent(const RealMatrix& a) { return ryser<double>(a); }

Complex determinant(const ComplexMatrix& a) {
  if (a.rows() == 0) return Complex(1.0);
  return a.partialPivLu().determinant();
}

double determinant(const RealMatrix& a) {
  if (a.rows() == 0) return 1.0;
  return a.partialPivLu().determinant();
}

ComplexMatrix hermitian_function(const ComplexMatrix& a, const std::function<double(double)>& fn,
                                 double lo, double hi, double clamp_tolerance) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(a);
  if (eig.info() != Eigen::Success) throw ConstraintViolation("eigendecomposition failed");
  RealVector values = eig.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    double& v = values(i);
    if (v < lo - clamp_tolerance || v > hi + clamp_tolerance) {
      throw ConstraintViolation("eigenvalue " + std::to_string(v) + " lies outside [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    v = std::clamp(v, lo, hi);
    v = fn(v);
  }
  const ComplexMatrix& u = eig.eigenvectors();
  return u * values.cast<Complex>().asDiagonal() * u.adjoint();
}

double hermiticity_defect(const ComplexMatrix& a) { return (a - a.adjoint()).cwiseAbs().maxCoeff(); }

double max_abs(const ComplexMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace quasifree
