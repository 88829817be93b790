// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file kernels.hpp
 * @brief Momentum-space densities k_hat and the position-space kernels they induce.
 *
 * The kernel convention throughout the library is
 *
 *     kappa(x) = (2 pi)^{-d} \int k_hat(lambda) e^{i lambda.x} d lambda,
 *
 * so that kappa(0) = (2 pi)^{-d} ||k_hat||_{L^1} for non-negative k_hat.
 * Every built-in density is radial, which makes every kernel real and even.
 */

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace quasifree {

enum class Statistics { fermion, boson };

[[nodiscard]] std::string_view to_string(Statistics s);
[[nodiscard]] Statistics parse_statistics(std::string_view name);

/// Fermi-Dirac occupation exp(b mu - b|l|^2/2m) / (1 + exp(b mu - b|l|^2/2m)).
struct FermiDirac {
  double beta = 1.0;
  double mu = 0.0;
  double mass = 1.0;
};

/// Zero-temperature limit: indicator of the Fermi ball of radius k_f.
struct ZeroTemperature {
  double kf = 1.0;
};

/// Ideal Bose gas: z e^{-beta|l|^2} / (1 - z e^{-beta|l|^2}), 0 <= z < 1.
struct Bose {
  double beta = 1.0;
  double activity = 0.5;
};

/// Radial profile k_hat(|lambda|), linearly interpolated, zero beyond the last radius.
struct Tabulated {
  std::vector<double> radii;
  std::vector<double> values;
};

using DensityFamily = std::variant<FermiDirac, ZeroTemperature, Bose, Tabulated>;

class MomentumDensity {
 public:
  /// Throws ParameterError on non-positive beta/mass/k_f/dimension, negative activity or a
  /// malformed table, DivergenceError for activity >= 1.
  MomentumDensity(DensityFamily family, int dimension, Statistics statistics);

  /// k_hat at a momentum of the given Euclidean norm.
  [[nodiscard]] double radial(double momentum_norm) const;
  [[nodiscard]] double operator()(std::span<const double> momentum) const;

  [[nodiscard]] const DensityFamily& family() const noexcept { return family_; }
  [[nodiscard]] std::string family_name() const;
  [[nodiscard]] int dimension() const noexcept { return dimension_; }
  [[nodiscard]] Statistics statistics() const noexcept { return statistics_; }

  /// Analytic supremum of k_hat (the constant C of the boson constraint).
  [[nodiscard]] double supremum() const;

  /// Upper bound on \int_{|lambda| > radius} k_hat.
  [[nodiscard]] double tail_mass_bound(double radius) const;

  /// Smallest radius (found by bisection) whose tail mass bound is below `tolerance`.
  [[nodiscard]] double truncation_radius(double tolerance) const;

  /// Radii where k_hat is not smooth (Fermi sphere, table nodes) or varies fastest.
  [[nodiscard]] std::vector<double> breakpoints() const;

 private:
  DensityFamily family_;
  int dimension_;
  Statistics statistics_;
};

/// Surface area of the unit sphere S^{d-1} in R^d.
[[nodiscard]] double unit_sphere_area(int dimension);

// --- closed forms ---------------------------------------------------------

/// Logistic occupation in an overflow-free form. Throws ParameterError unless beta, mass > 0.
[[nodiscard]] double fermi_dirac_density(double momentum_norm, double beta, double mu, double mass);

/// sin(k_f r) / (pi r); k_f / pi at r = 0.
[[nodiscard]] double zero_temp_kernel_1d(double r, double kf);

/// 3 rho (sin z - z cos z) / z^3 with z = k_f r and rho = k_f^3 / (6 pi^2).
[[nodiscard]] double zero_temp_kernel_3d(std::span<const double> x, double kf);
[[nodiscard]] double zero_temp_kernel_3d_radial(double r, double kf);

/// k_f J_1(k_f r) / (2 pi r).
[[nodiscard]] double zero_temp_kernel_2d(double r, double kf);

struct BoseSeries {
  double value = 0.0;
  double tail_bound = 0.0;  ///< z^{N+1} / (1 - z) (4 pi beta)^{-d/2}
  int terms = 0;
};

/// sum_{n>=1} z^n (4 pi beta n)^{-d/2} exp(-r^2 / (4 n beta)), truncated once the geometric
/// tail bound drops below `tolerance`. Throws DivergenceError for z >= 1.
[[nodiscard]] BoseSeries bose_kernel(double r, double beta, double activity, int dimension,
                                     double tolerance = 1e-15);

/// Closed-form kappa at radius r when the family has one (zero_temp d <= 3, bose, fermi_dirac
/// with mu < 0 via its Gaussian expansion); nullopt otherwise.
[[nodiscard]] std::optional<double> closed_form_kernel(const MomentumDensity& density, double r);
[[nodiscard]] bool has_closed_form(const MomentumDensity& density);

// --- quadrature -----------------------------------------------------------

struct QuadratureOptions {
  double tail_tolerance = 1e-12;  ///< analytic tail mass beyond the truncation radius
  double tolerance = 1e-11;       ///< panel-doubling convergence target
  int max_refinements = 10;
};

/// kappa(r) by radial quadrature of k_hat against the d-dimensional plane-wave average.
/// Throws AccuracyError when panel doubling does not converge.
[[nodiscard]] double kernel_from_density(const MomentumDensity& density, double r,
                                         const QuadratureOptions& options = {});
[[nodiscard]] double kernel_from_density(const MomentumDensity& density,
                                         std::span<const double> x,
                                         const QuadratureOptions& options = {});

/// ||k_hat||_{L^1} by the same radial quadrature.
[[nodiscard]] double density_l1_norm(const MomentumDensity& density,
                                     const QuadratureOptions& options = {});

// --- validation -----------------------------------------------------------

struct DensityReport {
  Statistics statistics = Statistics::fermion;
  double minimum = 0.0;
  double maximum = 0.0;
  double l1_norm = 0.0;
  double tail_bound = 0.0;
  double bound = 1.0;                   ///< C (boson) or 1 (fermion)
  std::vector<double> offending_radii;  ///< |lambda| where the constraint fails (capped)
  std::size_t offending_count = 0;
  bool passed = true;
  std::string message;
};

/// Samples k_hat on a dense radial grid and checks 0 <= k_hat <= 1 (fermion) or
/// 0 <= k_hat <= C (boson). Never throws for constraint failures.
[[nodiscard]] DensityReport inspect_density(const MomentumDensity& density,
                                            std::size_t samples = 20001);

/// As inspect_density, but throws ConstraintViolation naming the violated constraint.
DensityReport validate_density(const MomentumDensity& density, std::size_t samples = 20001);

// --- kernel object --------------------------------------------------------

enum class KernelMethod { automatic, closed_form, quadrature };

[[nodiscard]] std::string_view to_string(KernelMethod m);

/// Translation-invariant covariance kappa with cached kappa(0) and ||k_hat||_1.
class Kernel {
 public:
  explicit Kernel(MomentumDensity density, KernelMethod method = KernelMethod::automatic,
                  QuadratureOptions options = {});

  [[nodiscard]] double operator()(std::span<const double> x) const;
  [[nodiscard]] double at_radius(double r) const;

  [[nodiscard]] double kappa0() const noexcept { return kappa0_; }
  [[nodiscard]] double l1_norm() const noexcept { return l1_norm_; }
  /// (2 pi)^{-d} ||k_hat||_1, the uniform bound on |kappa|.
  [[nodiscard]] double sup_bound() const noexcept;
  [[nodiscard]] KernelMethod method() const noexcept { return method_; }
  [[nodiscard]] const MomentumDensity& density() const noexcept { return density_; }
  [[nodiscard]] int dimension() const noexcept { return density_.dimension(); }
  [[nodiscard]] Statistics statistics() const noexcept { return density_.statistics(); }

 private:
  MomentumDensity density_;
  KernelMethod method_;
  QuadratureOptions options_;
  double kappa0_ = 0.0;
  double l1_norm_ = 0.0;
};

// --- configuration --------------------------------------------------------

/// Parses `key = value` lines (`#` comments) into a density. Keys: family, statistics,
/// dimension (or d), kf, beta, mu, mass, z (or activity), radii, values.
[[nodiscard]] MomentumDensity parse_density_config(std::string_view text);
[[nodiscard]] MomentumDensity load_density_config(const std::string& path);
[[nodiscard]] std::string to_config_string(const MomentumDensity& density);

}  // namespace quasifree
