// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file correlations.hpp
 * @brief Correlation functions k^{(n)} = det / per (kappa(x_i - x_j)) with runtime bound checks.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "quasifree/kernels.hpp"
#include "quasifree/linalg.hpp"

namespace quasifree {

/// Largest tuple accepted by per_correlation.
inline constexpr int kMaxCorrelationOrder = 20;

/// Ordered points x_1..x_n in R^d, stored flat.
class PointTuple {
 public:
  /// Throws ParameterError for d < 1, an empty tuple, a ragged coordinate list or
  /// non-finite coordinates.
  PointTuple(int dimension, std::vector<double> coordinates);

  [[nodiscard]] int dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::size_t size() const noexcept {
    return coordinates_.size() / static_cast<std::size_t>(dimension_);
  }
  [[nodiscard]] std::span<const double> point(std::size_t i) const;
  [[nodiscard]] const std::vector<double>& coordinates() const noexcept { return coordinates_; }

 private:
  int dimension_;
  std::vector<double> coordinates_;
};

struct CorrelationValue {
  double value = 0.0;
  int order = 0;
  Statistics statistics = Statistics::fermion;
  double bound = 0.0;              ///< C^n n^{n/2} (fermion) or n! C^n (boson)
  double imaginary_residue = 0.0;  ///< discarded imaginary part
  double truncated = 0.0;          ///< negative dust set to zero (fermion)
};

/// kappa(x_i - x_j).
[[nodiscard]] RealMatrix kernel_matrix(const Kernel& kernel, const PointTuple& points);

/// Fermion cap (sup |kappa|)^n n^{n/2}.
[[nodiscard]] double hadamard_bound(double sup_bound, int n);
[[nodiscard]] double hadamard_bound(const Kernel& kernel, int n);

/// Boson cap n! (sup |kappa|)^n.
[[nodiscard]] double permanent_bound(double sup_bound, int n);

/// det of a kernel matrix. Imaginary parts and negative values up to 1e-10 are discarded and
/// recorded; larger ones, or a value above the cap, throw ConsistencyError.
[[nodiscard]] CorrelationValue det_correlation(const ComplexMatrix& matrix, double sup_bound);
/// per of a kernel matrix; SizeError above kMaxCorrelationOrder.
[[nodiscard]] CorrelationValue per_correlation(const ComplexMatrix& matrix, double sup_bound);

/// Throws ParameterError when the kernel statistics or dimension does not match.
[[nodiscard]] CorrelationValue det_correlation(const Kernel& kernel, const PointTuple& points);
[[nodiscard]] CorrelationValue per_correlation(const Kernel& kernel, const PointTuple& points);
/// Dispatches on the kernel statistics.
[[nodiscard]] CorrelationValue correlation(const Kernel& kernel, const PointTuple& points);

/// Raw moments E<gamma, f>^n for n = 1..max_order from factorial-moment integrals.
/// `integral(e)` must return  \int f(x_1)^{e_1} ... f(x_b)^{e_b} k^{(b)}(x_1..x_b) dx;
/// block structure follows the set partitions of {1..n}.
[[nodiscard]] std::vector<double> factorial_to_raw(
    const std::function<double(std::span<const int>)>& integral, int max_order);

/// Cell-sum factorial integral h^{db} sum_{y_1..y_b} prod f(y_j)^{e_j} k^{(b)}(y).
/// `centers` holds N points flat, `weights` the values f at the centers.
[[nodiscard]] double factorial_integral(const Kernel& kernel, std::span<const double> centers,
                                        double cell_volume, std::span<const double> weights,
                                        std::span<const int> exponents);

/// factorial_to_raw with the cell-sum integral; max_order <= 3.
[[nodiscard]] std::vector<double> raw_moments(const Kernel& kernel, std::span<const double> centers,
                                              double cell_volume, std::span<const double> weights,
                                              int max_order);

}  // namespace quasifree
