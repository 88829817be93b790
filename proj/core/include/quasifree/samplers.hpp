// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file samplers.hpp
 * @brief Window samplers for the fermion (determinantal) and boson (permanental) processes,
 *        and replica estimators of their intensity and pair correlation.
 *
 * Fermion configurations come from the Nystrom discretization M_ij = kappa(c_i - c_j) h^d of
 * the kernel on a cell grid: eigenvectors are kept with probability equal to their eigenvalue,
 * cells are drawn sequentially from the resulting projection kernel, and points are jittered
 * uniformly inside their cells.
 *
 * Boson configurations are drawn as a Cox process: a stationary complex Gaussian field
 * G(x) = sum_j ((2 pi)^{-d} k_hat(lambda_j) dlambda)^{1/2} xi_j e^{i lambda_j . x} on a
 * frequency lattice with E[G(x) conj(G(y))] ~ kappa(x - y), then a Poisson configuration with
 * intensity |G|^2, piecewise constant on the cells.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quasifree/kernels.hpp"
#include "quasifree/linalg.hpp"

namespace quasifree {

/// Box [0, L_1] x ... x [0, L_d].
class Window {
 public:
  /// Throws ParameterError unless every extent is finite and positive.
  explicit Window(std::vector<double> extents);

  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(extents_.size()); }
  [[nodiscard]] const std::vector<double>& extents() const noexcept { return extents_; }
  [[nodiscard]] double volume() const noexcept;
  [[nodiscard]] bool contains(std::span<const double> x) const noexcept;

 private:
  std::vector<double> extents_;
};

/// Regular cell grid on a window; cell index is row-major with axis 0 slowest.
class GridDiscretization {
 public:
  /// Throws ParameterError for fewer than 2 cells on some axis or a dimension mismatch.
  GridDiscretization(Window window, std::vector<int> cells_per_axis);

  [[nodiscard]] const Window& window() const noexcept { return window_; }
  [[nodiscard]] int dimension() const noexcept { return window_.dimension(); }
  [[nodiscard]] const std::vector<int>& cells_per_axis() const noexcept { return cells_; }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] const std::vector<double>& widths() const noexcept { return widths_; }
  [[nodiscard]] double cell_volume() const noexcept { return cell_volume_; }
  /// Cell centers, flat (size() x d).
  [[nodiscard]] const std::vector<double>& centers() const noexcept { return centers_; }
  [[nodiscard]] std::span<const double> center(std::size_t cell) const;
  [[nodiscard]] std::vector<int> multi_index(std::size_t cell) const;

 private:
  Window window_;
  std::vector<int> cells_;
  std::vector<double> widths_;
  std::vector<double> centers_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

/// Finite point set in a window, stored flat.
struct Configuration {
  int dimension = 1;
  std::vector<double> coordinates;

  [[nodiscard]] std::size_t size() const noexcept {
    return coordinates.size() / static_cast<std::size_t>(dimension);
  }
  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    const auto d = static_cast<std::size_t>(dimension);
    return std::span<const double>(coordinates).subspan(i * d, d);
  }
};

struct DiscretizedKernel {
  Statistics statistics = Statistics::fermion;
  GridDiscretization grid;
  RealMatrix matrix;       ///< kappa(c_i - c_j) h^d
  RealVector eigenvalues;  ///< ascending, clamped to [0, 1] (fermion) or [0, inf) (boson)
  RealMatrix eigenvectors;
  double max_clamp = 0.0;  ///< largest distance moved by clamping
};

/// kappa(c_i - c_j) on the cell centers, without the cell-volume factor.
[[nodiscard]] RealMatrix kernel_on_grid(const Kernel& kernel, const GridDiscretization& grid);

/// Largest clamp tolerated by discretize_kernel.
inline constexpr double kMaxEigenvalueClamp = 1e-3;

/// Throws DiscretizationError when clamping moves an eigenvalue by more than
/// kMaxEigenvalueClamp, ParameterError on a dimension mismatch.
[[nodiscard]] DiscretizedKernel discretize_kernel(const Kernel& kernel,
                                                  const GridDiscretization& grid);

/// RNG stream tags.
inline constexpr std::uint64_t kFermionStream = 1;
inline constexpr std::uint64_t kBosonStream = 2;

/// One determinantal configuration. Throws SamplerStateError if a conditional probability
/// drops below -1e-9 and ParameterError for boson kernels.
[[nodiscard]] Configuration sample_fermion(const DiscretizedKernel& kernel, std::uint64_t seed,
                                           std::uint64_t replica = 0);

struct CoxFieldOptions {
  double padding = 20.0;          ///< period per axis is 2 L_j + padding
  double tail_tolerance = 1e-12;  ///< k_hat mass left outside the frequency ball
  std::size_t max_frequencies = std::size_t{1} << 20;
  std::size_t max_cached_entries = std::size_t{1} << 22;
};

/// Cox sampler for a boson density; the spectral synthesis matrix is built once.
class CoxSampler {
 public:
  /// Throws ConstraintViolation for a non boson-valid density, SizeError when the frequency
  /// lattice exceeds options.max_frequencies.
  CoxSampler(const MomentumDensity& density, GridDiscretization grid, CoxFieldOptions options = {});

  /// G at the cell centers.
  [[nodiscard]] ComplexVector field(std::uint64_t seed, std::uint64_t replica = 0) const;
  [[nodiscard]] Configuration sample(std::uint64_t seed, std::uint64_t replica = 0) const;

  /// sum_j (2 pi)^{-d} k_hat(lambda_j) dlambda, the exact E|G(x)|^2 of the synthesized field.
  [[nodiscard]] double spectral_variance() const noexcept { return variance_; }
  [[nodiscard]] std::size_t frequency_count() const noexcept { return amplitudes_.size(); }
  [[nodiscard]] const GridDiscretization& grid() const noexcept { return grid_; }

 private:
  ComplexVector synthesize(const ComplexVector& xi) const;

  GridDiscretization grid_;
  std::vector<double> frequencies_;  ///< flat, frequency_count() x d
  std::vector<double> amplitudes_;
  ComplexMatrix synthesis_;  ///< cells x frequencies, empty when too large to cache
  double variance_ = 0.0;
};

[[nodiscard]] Configuration sample_boson(const MomentumDensity& density,
                                         const GridDiscretization& grid, std::uint64_t seed,
                                         std::uint64_t replica = 0);

/// Runs draw(0..count-1) on up to `threads` workers (0: hardware concurrency). The result
/// depends only on `draw`, never on scheduling.
[[nodiscard]] std::vector<Configuration> sample_replicas(
    std::size_t count, const std::function<Configuration(std::uint64_t)>& draw,
    unsigned threads = 0);

// --- estimators -----------------------------------------------------------

struct IntensityBin {
  std::vector<double> lower;
  std::vector<double> upper;
  double value = 0.0;
  double standard_error = 0.0;
};

struct IntensityEstimate {
  std::size_t replicas = 0;
  std::vector<IntensityBin> bins;
  double mean = 0.0;  ///< mean count / |window|
  double mean_stderr = 0.0;
  double count_mean = 0.0;
  double count_variance = 0.0;  ///< unbiased replica variance of the total count
};

/// Per-bin counts / (bin volume x replicas) with replica standard errors. Throws ParameterError
/// for fewer than 2 replicas.
[[nodiscard]] IntensityEstimate estimate_intensity(std::span<const Configuration> configs,
                                                   const Window& window,
                                                   std::vector<int> bins_per_axis);

enum class EdgeCorrection { translation, periodic };

[[nodiscard]] std::string_view to_string(EdgeCorrection c);
[[nodiscard]] EdgeCorrection parse_edge_correction(std::string_view name);

struct PairBin {
  double lower = 0.0;
  double upper = 0.0;
  double value = 0.0;  ///< NaN when empty
  double standard_error = 0.0;
  std::size_t pairs = 0;  ///< ordered pairs counted over all replicas
  bool empty = true;
};

struct PairCorrelationEstimate {
  std::size_t replicas = 0;
  double reference_intensity = 0.0;
  EdgeCorrection correction = EdgeCorrection::translation;
  std::vector<PairBin> bins;
};

/// g2 on radial bins given by ascending `edges`, normalized by reference_intensity^2 (the
/// pooled empirical intensity when omitted). Translation correction weights a pair by
/// |W| / |W cap (W - delta)|; periodic wraps displacements on the torus and needs
/// edges.back() <= min L_j / 2. Throws ParameterError for fewer than 2 replicas or bad edges.
[[nodiscard]] PairCorrelationEstimate estimate_pair_correlation(
    std::span<const Configuration> configs, const Window& window, std::span<const double> edges,
    std::optional<double> reference_intensity = std::nullopt,
    EdgeCorrection correction = EdgeCorrection::translation);

struct CharacteristicEstimate {
  std::string label;
  Complex value;
  double standard_error = 0.0;
};

struct EstimateReport {
  std::size_t replicas = 0;
  IntensityEstimate intensity;
  PairCorrelationEstimate pair;
  std::vector<CharacteristicEstimate> characteristic;
};

/// Volume of the unit ball in R^d.
[[nodiscard]] double unit_ball_volume(int dimension);

}  // namespace quasifree
