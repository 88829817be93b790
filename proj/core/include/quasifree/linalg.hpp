// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace quasifree {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Largest order accepted by the exact permanent.
inline constexpr int kMaxPermanentOrder = 30;

/// Ryser inclusion-exclusion over a Gray-code walk of column subsets, O(2^n n).
/// Throws SizeError above kMaxPermanentOrder.
[[nodiscard]] Complex permanent(const ComplexMatrix& a);
[[nodiscard]] double permanent(const RealMatrix& a);

/// Determinant through partial-pivot LU.
[[nodiscard]] Complex determinant(const ComplexMatrix& a);
[[nodiscard]] double determinant(const RealMatrix& a);

/// Applies `fn` to the spectrum of a Hermitian matrix. Eigenvalues within `clamp_tolerance`
/// outside [lo, hi] are clamped onto the interval; farther ones raise ConstraintViolation.
[[nodiscard]] ComplexMatrix hermitian_function(const ComplexMatrix& a,
                                               const std::function<double(double)>& fn, double lo,
                                               double hi, double clamp_tolerance);

/// max_ij |a_ij - a_ji^*|
[[nodiscard]] double hermiticity_defect(const ComplexMatrix& a);

/// max_ij |a_ij|
[[nodiscard]] double max_abs(const ComplexMatrix& a);

}  // namespace quasifree
