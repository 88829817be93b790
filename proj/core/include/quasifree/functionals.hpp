// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file functionals.hpp
 * @brief Characteristic functional E exp(i <gamma, f>) by three routes: the correlation series
 *        sum_n 1/n! \int prod (e^{if(x_k)} - 1) k^{(n)}(x) dx, the finite-rank resummation
 *        det(I + D_u M) (fermion) / det(I - D_u M)^{-1} (boson) with D_u = diag(e^{if(c)} - 1),
 *        and the replica average over sampled configurations.
 *
 * All integrals are restricted to the window; test functions are taken to vanish outside it.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "quasifree/kernels.hpp"
#include "quasifree/linalg.hpp"
#include "quasifree/samplers.hpp"

namespace quasifree {

/// Bounded real test function.
class TestFunction {
 public:
  struct Gaussian {
    std::vector<double> center;
    double width = 1.0;
    double amplitude = 1.0;
  };
  struct Indicator {
    std::vector<double> lower;
    std::vector<double> upper;
    double amplitude = 1.0;
  };
  /// Piecewise constant on a regular grid over [0, extents].
  struct Tabulated {
    std::vector<double> extents;
    std::vector<int> cells;
    std::vector<double> values;
  };

  /// amplitude exp(-|x - center|^2 / (2 width^2)).
  static TestFunction gaussian(std::vector<double> center, double width, double amplitude);
  /// amplitude on the box [lower, upper).
  static TestFunction indicator(std::vector<double> lower, std::vector<double> upper,
                                double amplitude);
  static TestFunction tabulated(std::vector<double> extents, std::vector<int> cells,
                                std::vector<double> values);

  /// "gaussian:center=5;width=1;amplitude=0.5", "indicator:lower=2;upper=4;amplitude=0.3",
  /// "tabulated:extents=10;cells=4;values=0,0.2,0.2,0". Vector fields are comma separated.
  static TestFunction parse(std::string_view spec);

  [[nodiscard]] double operator()(std::span<const double> x) const;
  [[nodiscard]] int dimension() const noexcept { return dimension_; }
  [[nodiscard]] double sup_abs() const noexcept;
  /// factor * f.
  [[nodiscard]] TestFunction scaled(double factor) const;
  /// Box outside which f is zero (Gaussian: below 1e-22 of its peak), intersected with the
  /// window. Throws ParameterError if it misses the window.
  void support(const Window& window, std::vector<double>& lower, std::vector<double>& upper) const;
  [[nodiscard]] std::string describe() const;

 private:
  using Variant = std::variant<Gaussian, Indicator, Tabulated>;
  explicit TestFunction(Variant v);
  Variant f_;
  int dimension_ = 1;
};

enum class FunctionalMethod { series, fredholm, empirical };

[[nodiscard]] std::string_view to_string(FunctionalMethod m);

struct FunctionalValue {
  Complex value{1.0, 0.0};
  FunctionalMethod method = FunctionalMethod::series;
  int n_max = 0;             ///< series
  std::size_t replicas = 0;  ///< empirical
  double error_estimate = 0.0;  ///< quasi-Monte-Carlo (series) or replica standard error
  double tail_bound = 0.0;      ///< series truncation bound; infinite when unavailable
  bool truncation_warning = false;
  std::vector<Complex> terms;  ///< series terms 0..n_max
  std::vector<double> term_errors;
};

struct SeriesOptions {
  std::size_t qmc_nodes = 100000;  ///< split evenly over the randomizations
  int randomizations = 8;
  std::uint64_t seed = 2026;
  double tail_tolerance = 1e-6;  ///< tail bounds above this raise truncation_warning
};

inline constexpr int kMaxSeriesOrder = 8;

/// Truncated correlation series. Orders 1 and 2 are cell sums on `grid` (the grid the Fredholm
/// form uses); orders >= 3 use randomly shifted Sobol points over the support box.
/// The tail bound is sum_{n > n_max} c^n n^{n/2} / n! (fermion) or boson_tail_bound (boson)
/// with c = sup|kappa| ||e^{if} - 1||_1 and a = sup|e^{if} - 1| sup k_hat.
/// Throws ParameterError for n_max outside [0, kMaxSeriesOrder] or a dimension mismatch.
[[nodiscard]] FunctionalValue characteristic_series(const Kernel& kernel, const TestFunction& f,
                                                    const GridDiscretization& grid, int n_max,
                                                    const SeriesOptions& options = {});

/// Fermion tail bound for a given c and n_max.
[[nodiscard]] double fermion_tail_bound(double c, int n_max);
/// Boson tail bound: the smaller of c^{n_max+1} / (1 - c) (from |per| <= n! kappa(0)^n, needs
/// c < 1) and the Cauchy estimate min_{1 < R < 1/a} (1 - R a)^{-c/a} R^{-(n_max+1)} / (1 - 1/R)
/// for the resolvent det(I - zA)^{-1}, where c bounds the trace norm and a the operator norm of
/// A = D_u K (needs a < 1). Infinity when neither applies.
[[nodiscard]] double boson_tail_bound(double c, double a, int n_max);

/// Largest allowed ||D_u M|| for the boson resolvent form.
inline constexpr double kMaxBosonResolventNorm = 0.9;

/// det(I + D_u M) or det(I - D_u M)^{-1} for the cell matrix M (cell volume included) and f at
/// the cell centers. Throws DivergenceError if ||D_u M||_2 >= kMaxBosonResolventNorm (boson).
[[nodiscard]] FunctionalValue fredholm_value(const RealMatrix& matrix,
                                             std::span<const double> f_at_centers,
                                             Statistics statistics);
[[nodiscard]] FunctionalValue fredholm_value(const DiscretizedKernel& kernel, const TestFunction& f);

/// Replica mean of exp(i sum_{x in gamma} f(x)) with standard error sqrt(E|Z - mean|^2 / N).
/// Throws ParameterError for fewer than 2 replicas.
[[nodiscard]] FunctionalValue empirical_characteristic(std::span<const Configuration> configs,
                                                       const TestFunction& f);

}  // namespace quasifree
