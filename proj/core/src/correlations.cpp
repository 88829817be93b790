// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include "quasifree/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "quasifree/algebra.hpp"
#include "quasifree/error.hpp"

namespace quasifree {

namespace {

constexpr double kDustTolerance = 1e-10;

void require_statistics(const Kernel& kernel, Statistics expected, const char* op) {
  if (kernel.statistics() != expected) {
    throw ParameterError(std::string(op) + " needs a " + std::string(to_string(expected)) +
                         " kernel, got " + std::string(to_string(kernel.statistics())));
  }
}

ComplexMatrix as_complex(const RealMatrix& m) { return m.cast<Complex>(); }

}  // namespace

PointTuple::PointTuple(int dimension, std::vector<double> coordinates)
    : dimension_(dimension), coordinates_(std::move(coordinates)) {
  if (dimension_ < 1) throw ParameterError("point dimension must be >= 1");
  if (coordinates_.empty()) throw ParameterError("point tuple must contain at least one point");
  if (coordinates_.size() % static_cast<std::size_t>(dimension_) != 0) {
    throw ParameterError("coordinate count is not a multiple of the dimension");
  }
  for (double c : coordinates_) {
    if (!std::isfinite(c)) throw ParameterError("point coordinates must be finite");
  }
}

std::span<const double> PointTuple::point(std::size_t i) const {
  const auto d = static_cast<std::size_t>(dimension_);
  return std::span<const double>(coordinates_).subspan(i * d, d);
}

RealMatrix kernel_matrix(const Kernel& kernel, const PointTuple& points) {
  if (points.dimension() != kernel.dimension()) {
    throw ParameterError("point dimension " + std::to_string(points.dimension()) +
                         " does not match kernel dimension " +
                         std::to_string(kernel.dimension()));
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  RealMatrix m(n, n);
  std::vector<double> diff(static_cast<std::size_t>(points.dimension()));
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = kernel.kappa0();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto xi = points.point(static_cast<std::size_t>(i));
      const auto xj = points.point(static_cast<std::size_t>(j));
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = xi[k] - xj[k];
      m(i, j) = m(j, i) = kernel(diff);
    }
  }
  return m;
}

double hadamard_bound(double sup_bound, int n) {
  return std::pow(sup_bound, n) * std::pow(static_cast<double>(n), 0.5 * n);
}

double hadamard_bound(const Kernel& kernel, int n) { return hadamard_bound(kernel.sup_bound(), n); }

double permanent_bound(double sup_bound, int n) {
  return std::tgamma(static_cast<double>(n) + 1.0) * std::pow(sup_bound, n);
}

CorrelationValue det_correlation(const ComplexMatrix& matrix, double sup_bound) {
  const int n = static_cast<int>(matrix.rows());
  const Complex det = determinant(matrix);
  CorrelationValue out;
  out.order = n;
  out.statistics = Statistics::fermion;
  out.bound = hadamard_bound(sup_bound, n);
  out.imaginary_residue = det.imag();
  if (std::abs(det.imag()) > kDustTolerance) {
    throw ConsistencyError("determinant has imaginary part " + std::to_string(det.imag()) +
                           "; kernel matrix is not Hermitian");
  }
  out.value = det.real();
  if (out.value < -kDustTolerance) {
    throw ConsistencyError("negative correlation " + std::to_string(out.value) +
                           "; kernel is not positive semidefinite");
  }
  if (out.value < 0.0) {
    out.truncated = out.value;
    out.value = 0.0;
  }
  if (std::abs(out.value) > out.bound + kDustTolerance) {
    throw ConsistencyError("correlation " + std::to_string(out.value) +
                           " exceeds the Hadamard cap " + std::to_string(out.bound));
  }
  return out;
}

CorrelationValue per_correlation(const ComplexMatrix& matrix, double sup_bound) {
  const int n = static_cast<int>(matrix.rows());
  if (n > kMaxCorrelationOrder) {
    throw SizeError("permanent order " + std::to_string(n) + " exceeds " +
                    std::to_string(kMaxCorrelationOrder));
  }
  const Complex per = permanent(matrix);
  CorrelationValue out;
  out.order = n;
  out.statistics = Statistics::boson;
  out.bound = permanent_bound(sup_bound, n);
  out.imaginary_residue = per.imag();
  if (std::abs(per.imag()) > kDustTolerance) {
    throw ConsistencyError("permanent has imaginary part " + std::to_string(per.imag()) +
                           "; kernel matrix is not Hermitian");
  }
  out.value = per.real();
  if (std::abs(out.value) > out.bound + kDustTolerance) {
    throw ConsistencyError("correlation " + std::to_string(out.value) +
                           " exceeds the permanent cap " + std::to_string(out.bound));
  }
  return out;
}

CorrelationValue det_correlation(const Kernel& kernel, const PointTuple& points) {
  require_statistics(kernel, Statistics::fermion, "det_correlation");
  return det_correlation(as_complex(kernel_matrix(kernel, points)), kernel.sup_bound());
}

CorrelationValue per_correlation(const Kernel& kernel, const PointTuple& points) {
  require_statistics(kernel, Statistics::boson, "per_correlation");
  if (points.size() > static_cast<std::size_t>(kMaxCorrelationOrder)) {
    throw SizeError("permanent order " + std::to_string(points.size()) + " exceeds " +
                    std::to_string(kMaxCorrelationOrder));
  }
  return per_correlation(as_complex(kernel_matrix(kernel, points)), kernel.sup_bound());
}

CorrelationValue correlation(const Kernel& kernel, const PointTuple& points) {
  return kernel.statistics() == Statistics::fermion ? det_correlation(kernel, points)
                                                    : per_correlation(kernel, points);
}

std::vector<double> factorial_to_raw(const std::function<double(std::span<const int>)>& integral,
                                     int max_order) {
  if (max_order < 1) throw ParameterError("moment order must be >= 1");
  std::vector<double> raw;
  for (int n = 1; n <= max_order; ++n) {
    double sum = 0.0;
    for (const auto& partition : set_partitions(n)) {
      std::vector<int> exponents;
      for (const auto& block : partition) exponents.push_back(static_cast<int>(block.size()));
      sum += integral(exponents);
    }
    raw.push_back(sum);
  }
  return raw;
}

double factorial_integral(const Kernel& kernel, std::span<const double> centers,
                          double cell_volume, std::span<const double> weights,
                          std::span<const int> exponents) {
  const auto d = static_cast<std::size_t>(kernel.dimension());
  if (centers.size() != weights.size() * d) {
    throw ParameterError("centers and weights disagree on the number of cells");
  }
  const int b = static_cast<int>(exponents.size());
  if (b < 1 || b > 3) throw ParameterError("factorial integrals are provided for orders 1..3");

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] != 0.0) active.push_back(i);
  }
  const auto n = static_cast<Eigen::Index>(active.size());
  if (n == 0) return 0.0;

  RealMatrix k(n, n);
  std::vector<double> diff(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = kernel.kappa0();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      for (std::size_t a = 0; a < d; ++a) {
        diff[a] = centers[active[static_cast<std::size_t>(i)] * d + a] -
                  centers[active[static_cast<std::size_t>(j)] * d + a];
      }
      k(i, j) = k(j, i) = kernel(diff);
    }
  }
  auto weight_power = [&](int e) {
    RealVector w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      w(i) = std::pow(weights[active[static_cast<std::size_t>(i)]], e);
    }
    return w;
  };

  // sum_y prod_j w_j(y_j) prod_j K(y_j, y_sigma(j)) factorizes over the cycles of sigma into
  // traces tr(D_1 K D_2 K ... D_l K).
  const double sign_base = kernel.statistics() == Statistics::fermion ? -1.0 : 1.0;
  std::vector<int> sigma(static_cast<std::size_t>(b));
  std::iota(sigma.begin(), sigma.end(), 0);
  double total = 0.0;
  do {
    std::vector<bool> seen(static_cast<std::size_t>(b), false);
    double term = 1.0;
    int cycles = 0;
    for (int start = 0; start < b; ++start) {
      if (seen[static_cast<std::size_t>(start)]) continue;
      ++cycles;
      std::vector<int> cycle;
      for (int j = start; !seen[static_cast<std::size_t>(j)]; j = sigma[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        cycle.push_back(j);
      }
      RealMatrix chain = weight_power(exponents[static_cast<std::size_t>(cycle[0])]).asDiagonal() * k;
      for (std::size_t c = 1; c < cycle.size(); ++c) {
        chain = chain * (weight_power(exponents[static_cast<std::size_t>(cycle[c])]).asDiagonal() * k);
      }
      term *= chain.trace();
    }
    total += std::pow(sign_base, b - cycles) * term;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return total * std::pow(cell_volume, b);
}

std::vector<double> raw_moments(const Kernel& kernel, std::span<const double> centers,
                                double cell_volume, std::span<const double> weights,
                                int max_order) {
  if (max_order > 3) throw ParameterError("raw moments are provided up to order 3");
  return factorial_to_raw(
      [&](std::span<const int> e) {
        return factorial_integral(kernel, centers, cell_volume, weights, e);
      },
      max_order);
}

}  // namespace quasifree
