// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include "quasifree/samplers.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "quasifree/error.hpp"
#include "quasifree/rng.hpp"

namespace quasifree {

namespace {

constexpr double kNegativeProbabilityTolerance = 1e-9;

std::size_t product(const std::vector<int>& v) {
  std::size_t p = 1;
  for (int x : v) p *= static_cast<std::size_t>(x);
  return p;
}

// Row-major multi-index decomposition, axis 0 slowest.
std::vector<int> decompose(std::size_t index, const std::vector<int>& shape) {
  std::vector<int> out(shape.size());
  for (std::size_t a = shape.size(); a-- > 0;) {
    out[a] = static_cast<int>(index % static_cast<std::size_t>(shape[a]));
    index /= static_cast<std::size_t>(shape[a]);
  }
  return out;
}

void append_jittered(Configuration& config, const GridDiscretization& grid, std::size_t cell,
                     Philox4x32& rng) {
  const auto c = grid.center(cell);
  const auto& w = grid.widths();
  for (std::size_t a = 0; a < c.size(); ++a) {
    config.coordinates.push_back(c[a] + (rng.uniform() - 0.5) * w[a]);
  }
}

double sample_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

void require_replicas(std::size_t n, std::size_t minimum) {
  if (n < minimum) {
    throw ParameterError("estimator needs at least " + std::to_string(minimum) +
                         " replicas, got " + std::to_string(n));
  }
}

}  // namespace

// --- geometry ---------------------------------------------------------------

Window::Window(std::vector<double> extents) : extents_(std::move(extents)) {
  if (extents_.empty()) throw ParameterError("window needs at least one axis");
  for (double l : extents_) {
    if (!std::isfinite(l) || l <= 0.0) throw ParameterError("window extents must be positive");
  }
}

double Window::volume() const noexcept {
  double v = 1.0;
  for (double l : extents_) v *= l;
  return v;
}

bool Window::contains(std::span<const double> x) const noexcept {
  if (x.size() != extents_.size()) return false;
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (!(x[a] >= 0.0 && x[a] <= extents_[a])) return false;
  }
  return true;
}

GridDiscretization::GridDiscretization(Window window, std::vector<int> cells_per_axis)
    : window_(std::move(window)), cells_(std::move(cells_per_axis)) {
  if (static_cast<int>(cells_.size()) != window_.dimension()) {
    throw ParameterError("grid has " + std::to_string(cells_.size()) + " axes, window has " +
                         std::to_string(window_.dimension()));
  }
  for (int n : cells_) {
    if (n < 2) throw ParameterError("grid needs at least 2 cells per axis");
  }
  size_ = product(cells_);
  cell_volume_ = 1.0;
  for (std::size_t a = 0; a < cells_.size(); ++a) {
    widths_.push_back(window_.extents()[a] / cells_[a]);
    cell_volume_ *= widths_.back();
  }
  centers_.reserve(size_ * cells_.size());
  for (std::size_t cell = 0; cell < size_; ++cell) {
    const auto idx = decompose(cell, cells_);
    for (std::size_t a = 0; a < cells_.size(); ++a) {
      centers_.push_back((idx[a] + 0.5) * widths_[a]);
    }
  }
}

std::span<const double> GridDiscretization::center(std::size_t cell) const {
  const auto d = cells_.size();
  return std::span<const double>(centers_).subspan(cell * d, d);
}

std::vector<int> GridDiscretization::multi_index(std::size_t cell) const {
  return decompose(cell, cells_);
}

double unit_ball_volume(int dimension) { return unit_sphere_area(dimension) / dimension; }

// --- discretization ---------------------------------------------------------

RealMatrix kernel_on_grid(const Kernel& kernel, const GridDiscretization& grid) {
  if (kernel.dimension() != grid.dimension()) {
    throw ParameterError("kernel dimension " + std::to_string(kernel.dimension()) +
                         " does not match grid dimension " + std::to_string(grid.dimension()));
  }
  const auto& shape = grid.cells_per_axis();
  const std::size_t d = shape.size();

  // kappa depends on |i_a - j_a| per axis only: tabulate it once.
  std::vector<double> table(product(shape));
  std::vector<double> diff(d);
  for (std::size_t t = 0; t < table.size(); ++t) {
    const auto off = decompose(t, shape);
    for (std::size_t a = 0; a < d; ++a) diff[a] = off[a] * grid.widths()[a];
    table[t] = t == 0 ? kernel.kappa0() : kernel(diff);
  }

  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<std::vector<int>> index(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) index[i] = grid.multi_index(i);

  RealMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      std::size_t t = 0;
      for (std::size_t a = 0; a < d; ++a) {
        t = t * static_cast<std::size_t>(shape[a]) +
            static_cast<std::size_t>(std::abs(index[static_cast<std::size_t>(i)][a] -
                                              index[static_cast<std::size_t>(j)][a]));
      }
      m(i, j) = m(j, i) = table[t];
    }
  }
  return m;
}

DiscretizedKernel discretize_kernel(const Kernel& kernel, const GridDiscretization& grid) {
  RealMatrix m = kernel_on_grid(kernel, grid) * grid.cell_volume();
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw DiscretizationError("eigendecomposition of the discretized kernel failed");
  }
  RealVector eig = solver.eigenvalues();
  const double hi = kernel.statistics() == Statistics::fermion
                        ? 1.0
                        : std::numeric_limits<double>::infinity();
  double clamp = 0.0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    const double c = std::clamp(eig(i), 0.0, hi);
    clamp = std::max(clamp, std::abs(c - eig(i)));
    eig(i) = c;
  }
  if (clamp > kMaxEigenvalueClamp) {
    throw DiscretizationError("discretized kernel spectrum leaves its admissible interval by " +
                              std::to_string(clamp) + "; refine the grid");
  }
  return DiscretizedKernel{kernel.statistics(), grid, std::move(m), std::move(eig),
                           solver.eigenvectors(), clamp};
}

// --- fermion ----------------------------------------------------------------

Configuration sample_fermion(const DiscretizedKernel& kernel, std::uint64_t seed,
                             std::uint64_t replica) {
  if (kernel.statistics != Statistics::fermion) {
    throw ParameterError("sample_fermion needs a fermion kernel");
  }
  Philox4x32 rng(seed, replica_stream(replica, kFermionStream));
  Configuration config{kernel.grid.dimension(), {}};

  std::vector<Eigen::Index> selected;
  for (Eigen::Index i = 0; i < kernel.eigenvalues.size(); ++i) {
    if (rng.uniform() < kernel.eigenvalues(i)) selected.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(selected.size());
  if (k == 0) return config;

  const Eigen::Index n = kernel.eigenvectors.rows();
  RealMatrix v(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    v.col(c) = kernel.eigenvectors.col(selected[static_cast<std::size_t>(c)]);
  }
  RealVector residual = v.rowwise().squaredNorm();
  RealMatrix basis(n, k);

  for (Eigen::Index step = 0; step < k; ++step) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (residual(i) < -kNegativeProbabilityTolerance) {
        throw SamplerStateError("negative conditional probability " +
                                std::to_string(residual(i)) + " at cell " + std::to_string(i));
      }
      residual(i) = std::max(residual(i), 0.0);
      total += residual(i);
    }
    if (!(total > 0.0)) {
      throw SamplerStateError("conditional distribution vanished after " + std::to_string(step) +
                              " of " + std::to_string(k) + " points");
    }
    const double target = rng.uniform() * total;
    Eigen::Index cell = n - 1;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += residual(i);
      if (acc > target && residual(i) > 0.0) {
        cell = i;
        break;
      }
    }
    while (residual(cell) <= 0.0 && cell > 0) --cell;

    append_jittered(config, kernel.grid, static_cast<std::size_t>(cell), rng);

    RealVector col = v * v.row(cell).transpose();
    for (Eigen::Index s = 0; s < step; ++s) col -= basis.col(s) * basis(cell, s);
    col /= std::sqrt(residual(cell));
    residual -= col.cwiseAbs2();
    residual(cell) = 0.0;
    basis.col(step) = col;
  }
  return config;
}

// --- boson ------------------------------------------------------------------

CoxSampler::CoxSampler(const MomentumDensity& density, GridDiscretization grid,
                       CoxFieldOptions options)
    : grid_(std::move(grid)) {
  if (density.statistics() != Statistics::boson) {
    throw ParameterError("the Cox sampler needs a boson density");
  }
  if (density.dimension() != grid_.dimension()) {
    throw ParameterError("density dimension " + std::to_string(density.dimension()) +
                         " does not match grid dimension " + std::to_string(grid_.dimension()));
  }
  validate_density(density);

  const int d = grid_.dimension();
  const double cutoff = density.truncation_radius(options.tail_tolerance);
  std::vector<double> step(static_cast<std::size_t>(d));
  std::vector<int> half(static_cast<std::size_t>(d));
  std::vector<int> shape(static_cast<std::size_t>(d));
  double cell = std::pow(2.0 * std::numbers::pi, -d);
  for (int a = 0; a < d; ++a) {
    const double period = 2.0 * grid_.window().extents()[static_cast<std::size_t>(a)] + options.padding;
    step[static_cast<std::size_t>(a)] = 2.0 * std::numbers::pi / period;
    half[static_cast<std::size_t>(a)] = static_cast<int>(std::ceil(cutoff / step[static_cast<std::size_t>(a)]));
    shape[static_cast<std::size_t>(a)] = 2 * half[static_cast<std::size_t>(a)] + 1;
    cell *= step[static_cast<std::size_t>(a)];
  }
  const std::size_t lattice = product(shape);
  std::vector<double> lambda(static_cast<std::size_t>(d));
  for (std::size_t t = 0; t < lattice; ++t) {
    const auto idx = decompose(t, shape);
    double norm2 = 0.0;
    for (std::size_t a = 0; a < lambda.size(); ++a) {
      lambda[a] = (idx[a] - half[a]) * step[a];
      norm2 += lambda[a] * lambda[a];
    }
    if (norm2 > cutoff * cutoff) continue;
    const double weight = density.radial(std::sqrt(norm2)) * cell;
    if (!(weight > 0.0)) continue;
    if (amplitudes_.size() >= options.max_frequencies) {
      throw SizeError("frequency lattice exceeds " + std::to_string(options.max_frequencies) +
                      " points; shrink the window or the density support");
    }
    frequencies_.insert(frequencies_.end(), lambda.begin(), lambda.end());
    amplitudes_.push_back(std::sqrt(weight));
    variance_ += weight;
  }

  if (grid_.size() * amplitudes_.size() <= options.max_cached_entries) {
    const auto rows = static_cast<Eigen::Index>(grid_.size());
    const auto cols = static_cast<Eigen::Index>(amplitudes_.size());
    synthesis_.resize(rows, cols);
    for (Eigen::Index c = 0; c < rows; ++c) {
      const auto x = grid_.center(static_cast<std::size_t>(c));
      for (Eigen::Index j = 0; j < cols; ++j) {
        double phase = 0.0;
        for (int a = 0; a < d; ++a) {
          phase += frequencies_[static_cast<std::size_t>(j * d + a)] * x[static_cast<std::size_t>(a)];
        }
        synthesis_(c, j) = std::polar(amplitudes_[static_cast<std::size_t>(j)], phase);
      }
    }
  }
}

ComplexVector CoxSampler::synthesize(const ComplexVector& xi) const {
  if (synthesis_.size() > 0 || amplitudes_.empty()) {
    if (amplitudes_.empty()) return ComplexVector::Zero(static_cast<Eigen::Index>(grid_.size()));
    return synthesis_ * xi;
  }
  const int d = grid_.dimension();
  ComplexVector g(static_cast<Eigen::Index>(grid_.size()));
  for (std::size_t c = 0; c < grid_.size(); ++c) {
    const auto x = grid_.center(c);
    Complex sum{0.0, 0.0};
    for (std::size_t j = 0; j < amplitudes_.size(); ++j) {
      double phase = 0.0;
      for (int a = 0; a < d; ++a) phase += frequencies_[j * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
      sum += std::polar(amplitudes_[j], phase) * xi(static_cast<Eigen::Index>(j));
    }
    g(static_cast<Eigen::Index>(c)) = sum;
  }
  return g;
}

namespace {

ComplexVector draw_gaussians(std::size_t count, Philox4x32& rng) {
  std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2.0);
  ComplexVector xi(static_cast<Eigen::Index>(count));
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    const double re = normal(rng);
    const double im = normal(rng);
    xi(j) = Complex(re, im);
  }
  return xi;
}

}  // namespace

ComplexVector CoxSampler::field(std::uint64_t seed, std::uint64_t replica) const {
  Philox4x32 rng(seed, replica_stream(replica, kBosonStream));
  return synthesize(draw_gaussians(amplitudes_.size(), rng));
}

Configuration CoxSampler::sample(std::uint64_t seed, std::uint64_t replica) const {
  Philox4x32 rng(seed, replica_stream(replica, kBosonStream));
  const ComplexVector g = synthesize(draw_gaussians(amplitudes_.size(), rng));
  Configuration config{grid_.dimension(), {}};
  const double h = grid_.cell_volume();
  for (std::size_t c = 0; c < grid_.size(); ++c) {
    const double mean = std::norm(g(static_cast<Eigen::Index>(c))) * h;
    if (!(mean > 0.0)) continue;
    std::poisson_distribution<long> poisson(mean);
    const long count = poisson(rng);
    for (long p = 0; p < count; ++p) append_jittered(config, grid_, c, rng);
  }
  return config;
}

Configuration sample_boson(const MomentumDensity& density, const GridDiscretization& grid,
                           std::uint64_t seed, std::uint64_t replica) {
  return CoxSampler(density, grid).sample(seed, replica);
}

std::vector<Configuration> sample_replicas(
    std::size_t count, const std::function<Configuration(std::uint64_t)>& draw, unsigned threads) {
  std::vector<Configuration> out(count);
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t r = 0; r < count; ++r) out[r] = draw(r);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t r = w; r < count; r += workers) out[r] = draw(r);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// --- estimators -------------------------------------------------------------

IntensityEstimate estimate_intensity(std::span<const Configuration> configs, const Window& window,
                                     std::vector<int> bins_per_axis) {
  require_replicas(configs.size(), 2);
  const std::size_t d = static_cast<std::size_t>(window.dimension());
  if (bins_per_axis.size() != d) throw ParameterError("one bin count per window axis expected");
  for (int b : bins_per_axis) {
    if (b < 1) throw ParameterError("bin counts must be positive");
  }
  const std::size_t nbins = product(bins_per_axis);
  const std::size_t replicas = configs.size();
  std::vector<double> width(d);
  double bin_volume = 1.0;
  for (std::size_t a = 0; a < d; ++a) {
    width[a] = window.extents()[a] / bins_per_axis[a];
    bin_volume *= width[a];
  }

  std::vector<double> counts(nbins * replicas, 0.0);
  std::vector<double> totals(replicas, 0.0);
  for (std::size_t r = 0; r < replicas; ++r) {
    const auto& cfg = configs[r];
    if (cfg.size() > 0 && static_cast<std::size_t>(cfg.dimension) != d) {
      throw ParameterError("configuration dimension does not match the window");
    }
    for (std::size_t p = 0; p < cfg.size(); ++p) {
      const auto x = cfg.point(p);
      if (!window.contains(x)) continue;
      std::size_t bin = 0;
      for (std::size_t a = 0; a < d; ++a) {
        const int i = std::min(bins_per_axis[a] - 1, static_cast<int>(x[a] / width[a]));
        bin = bin * static_cast<std::size_t>(bins_per_axis[a]) + static_cast<std::size_t>(i);
      }
      counts[bin * replicas + r] += 1.0;
      totals[r] += 1.0;
    }
  }

  IntensityEstimate out;
  out.replicas = replicas;
  const double sqrt_r = std::sqrt(static_cast<double>(replicas));
  for (std::size_t b = 0; b < nbins; ++b) {
    std::span<const double> c(counts.data() + b * replicas, replicas);
    const double m = sample_mean(c);
    IntensityBin bin;
    const auto idx = decompose(b, bins_per_axis);
    for (std::size_t a = 0; a < d; ++a) {
      bin.lower.push_back(idx[a] * width[a]);
      bin.upper.push_back((idx[a] + 1) * width[a]);
    }
    bin.value = m / bin_volume;
    bin.standard_error = std::sqrt(sample_variance(c, m)) / sqrt_r / bin_volume;
    out.bins.push_back(std::move(bin));
  }
  out.count_mean = sample_mean(totals);
  out.count_variance = sample_variance(totals, out.count_mean);
  out.mean = out.count_mean / window.volume();
  out.mean_stderr = std::sqrt(out.count_variance) / sqrt_r / window.volume();
  return out;
}

std::string_view to_string(EdgeCorrection c) {
  return c == EdgeCorrection::translation ? "translation" : "periodic";
}

EdgeCorrection parse_edge_correction(std::string_view name) {
  if (name == "translation") return EdgeCorrection::translation;
  if (name == "periodic") return EdgeCorrection::periodic;
  throw ParameterError("unknown edge correction '" + std::string(name) +
                       "' (expected translation or periodic)");
}

PairCorrelationEstimate estimate_pair_correlation(std::span<const Configuration> configs,
                                                  const Window& window,
                                                  std::span<const double> edges,
                                                  std::optional<double> reference_intensity,
                                                  EdgeCorrection correction) {
  require_replicas(configs.size(), 2);
  if (edges.size() < 2) throw ParameterError("pair correlation needs at least one radial bin");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] >= 0.0 && edges[i + 1] > edges[i])) {
      throw ParameterError("radial bin edges must be non-negative and strictly increasing");
    }
  }
  const std::size_t d = static_cast<std::size_t>(window.dimension());
  const auto& ext = window.extents();
  if (correction == EdgeCorrection::periodic) {
    const double limit = *std::min_element(ext.begin(), ext.end()) / 2.0;
    if (edges.back() > limit) {
      throw ParameterError("periodic pair correlation needs radii <= half the shortest side");
    }
  }

  const std::size_t replicas = configs.size();
  double rho = 0.0;
  if (reference_intensity) {
    rho = *reference_intensity;
  } else {
    double total = 0.0;
    for (const auto& cfg : configs) total += static_cast<double>(cfg.size());
    rho = total / (static_cast<double>(replicas) * window.volume());
  }
  if (!(rho > 0.0)) throw ParameterError("pair correlation needs a positive reference intensity");

  const std::size_t nbins = edges.size() - 1;
  const double vol = window.volume();
  std::vector<double> shell(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    shell[b] = unit_ball_volume(static_cast<int>(d)) *
               (std::pow(edges[b + 1], static_cast<double>(d)) -
                std::pow(edges[b], static_cast<double>(d)));
  }

  std::vector<double> per_replica(nbins * replicas, 0.0);
  std::vector<std::size_t> pairs(nbins, 0);
  const double rmax = edges.back();
  for (std::size_t r = 0; r < replicas; ++r) {
    const auto& cfg = configs[r];
    for (std::size_t i = 0; i < cfg.size(); ++i) {
      const auto x = cfg.point(i);
      for (std::size_t j = 0; j < cfg.size(); ++j) {
        if (i == j) continue;
        const auto y = cfg.point(j);
        double dist2 = 0.0;
        double overlap = 1.0;
        for (std::size_t a = 0; a < d; ++a) {
          double dx = y[a] - x[a];
          if (correction == EdgeCorrection::periodic) dx -= ext[a] * std::round(dx / ext[a]);
          dist2 += dx * dx;
          overlap *= ext[a] - std::abs(dx);
        }
        const double dist = std::sqrt(dist2);
        if (dist >= rmax || dist < edges.front()) continue;
        const auto it = std::upper_bound(edges.begin(), edges.end(), dist);
        const auto b = static_cast<std::size_t>(it - edges.begin()) - 1;
        const double weight = correction == EdgeCorrection::periodic ? 1.0 : vol / overlap;
        per_replica[b * replicas + r] += weight;
        ++pairs[b];
      }
    }
  }

  PairCorrelationEstimate out;
  out.replicas = replicas;
  out.reference_intensity = rho;
  out.correction = correction;
  const double sqrt_r = std::sqrt(static_cast<double>(replicas));
  for (std::size_t b = 0; b < nbins; ++b) {
    PairBin bin;
    bin.lower = edges[b];
    bin.upper = edges[b + 1];
    bin.pairs = pairs[b];
    bin.empty = pairs[b] == 0;
    const double norm = vol * rho * rho * shell[b];
    std::vector<double> g(replicas);
    for (std::size_t r = 0; r < replicas; ++r) g[r] = per_replica[b * replicas + r] / norm;
    if (bin.empty) {
      bin.value = std::numeric_limits<double>::quiet_NaN();
      bin.standard_error = std::numeric_limits<double>::quiet_NaN();
    } else {
      bin.value = sample_mean(g);
      bin.standard_error = std::sqrt(sample_variance(g, bin.value)) / sqrt_r;
    }
    out.bins.push_back(bin);
  }
  return out;
}

}  // namespace quasifree
