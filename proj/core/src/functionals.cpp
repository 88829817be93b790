// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include "quasifree/functionals.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/random/sobol.hpp>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "quasifree/error.hpp"
#include "quasifree/rng.hpp"

namespace quasifree {

namespace {

constexpr std::uint64_t kSeriesStream = 3;
// exp(-z^2/2) < 1e-22 beyond this many widths.
constexpr double kGaussianReach = 10.07;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ParameterError("invalid number '" + std::string(text) + "' in test function spec");
  }
  return v;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

Complex phase_minus_one(double f) { return std::polar(1.0, f) - 1.0; }

// Kernel at a radius; quadrature kernels are tabulated once and interpolated (cubic).
class RadialLookup {
 public:
  RadialLookup(const Kernel& kernel, double max_radius) : kernel_(kernel) {
    if (kernel.method() != KernelMethod::quadrature) return;
    constexpr int kNodes = 4097;
    step_ = std::max(max_radius, 1e-12) / (kNodes - 3);
    table_.resize(kNodes);
    for (int i = 0; i < kNodes; ++i) table_[static_cast<std::size_t>(i)] = kernel.at_radius(i * step_);
  }

  double operator()(double r) const {
    if (table_.empty()) return kernel_.at_radius(r);
    const double t = r / step_;
    const auto i = static_cast<std::size_t>(t);
    if (i + 2 >= table_.size()) return kernel_.at_radius(r);
    const double s = t - static_cast<double>(i);
    const double p0 = i == 0 ? table_[1] : table_[i - 1];  // kappa is even
    const double p1 = table_[i];
    const double p2 = table_[i + 1];
    const double p3 = table_[i + 2];
    return p1 + 0.5 * s *
                    (p2 - p0 +
                     s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + s * (3.0 * (p1 - p2) + p3 - p0)));
  }

 private:
  const Kernel& kernel_;
  double step_ = 0.0;
  std::vector<double> table_;
};

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

}  // namespace

// --- test functions -------------------------------------------------------

TestFunction::TestFunction(Variant v) : f_(std::move(v)) {
  std::visit(
      [this](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          dimension_ = static_cast<int>(g.center.size());
        } else if constexpr (std::is_same_v<T, Indicator>) {
          dimension_ = static_cast<int>(g.lower.size());
        } else {
          dimension_ = static_cast<int>(g.extents.size());
        }
      },
      f_);
  if (dimension_ < 1) throw ParameterError("test function needs at least one coordinate");
}

TestFunction TestFunction::gaussian(std::vector<double> center, double width, double amplitude) {
  if (!(width > 0.0) || !std::isfinite(width)) throw ParameterError("gaussian width must be > 0");
  if (!std::isfinite(amplitude)) throw ParameterError("amplitude must be finite");
  return TestFunction(Gaussian{std::move(center), width, amplitude});
}

TestFunction TestFunction::indicator(std::vector<double> lower, std::vector<double> upper,
                                     double amplitude) {
  if (lower.size() != upper.size()) throw ParameterError("indicator box corners disagree in size");
  for (std::size_t a = 0; a < lower.size(); ++a) {
    if (!(upper[a] > lower[a])) throw ParameterError("indicator box must have upper > lower");
  }
  if (!std::isfinite(amplitude)) throw ParameterError("amplitude must be finite");
  return TestFunction(Indicator{std::move(lower), std::move(upper), amplitude});
}

TestFunction TestFunction::tabulated(std::vector<double> extents, std::vector<int> cells,
                                     std::vector<double> values) {
  if (extents.size() != cells.size()) throw ParameterError("tabulated extents and cells disagree");
  std::size_t total = 1;
  for (std::size_t a = 0; a < cells.size(); ++a) {
    if (!(extents[a] > 0.0) || cells[a] < 1) {
      throw ParameterError("tabulated grid needs positive extents and cell counts");
    }
    total *= static_cast<std::size_t>(cells[a]);
  }
  if (values.size() != total) {
    throw ParameterError("tabulated test function expects " + std::to_string(total) +
                         " values, got " + std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ParameterError("tabulated values must be finite");
  }
  return TestFunction(Tabulated{std::move(extents), std::move(cells), std::move(values)});
}

TestFunction TestFunction::parse(std::string_view spec) {
  spec = trim(spec);
  const auto colon = spec.find(':');
  const std::string_view kind = trim(spec.substr(0, colon));
  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  std::vector<double> center, lower, upper, extents, values;
  std::vector<int> cells;
  double width = 1.0, amplitude = 1.0;
  while (!trim(rest).empty()) {
    const auto semi = rest.find(';');
    const std::string_view item = trim(rest.substr(0, semi));
    rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("test function field '" + std::string(item) + "' lacks '='");
    }
    const std::string_view key = trim(item.substr(0, eq));
    const std::string_view value = item.substr(eq + 1);
    if (key == "center") {
      center = parse_list(value);
    } else if (key == "width") {
      width = parse_number(value);
    } else if (key == "amplitude") {
      amplitude = parse_number(value);
    } else if (key == "lower") {
      lower = parse_list(value);
    } else if (key == "upper") {
      upper = parse_list(value);
    } else if (key == "extents") {
      extents = parse_list(value);
    } else if (key == "cells") {
      for (double c : parse_list(value)) cells.push_back(static_cast<int>(c));
    } else if (key == "values") {
      values = parse_list(value);
    } else {
      throw ParameterError("unknown test function field '" + std::string(key) + "'");
    }
  }
  if (kind == "gaussian") return gaussian(std::move(center), width, amplitude);
  if (kind == "indicator") return indicator(std::move(lower), std::move(upper), amplitude);
  if (kind == "tabulated") return tabulated(std::move(extents), std::move(cells), std::move(values));
  throw ParameterError("unknown test function '" + std::string(kind) +
                       "' (expected gaussian, indicator or tabulated)");
}

double TestFunction::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension_) {
    throw ParameterError("test function of dimension " + std::to_string(dimension_) +
                         " evaluated at a point of dimension " + std::to_string(x.size()));
  }
  return std::visit(
      [x](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          double r2 = 0.0;
          for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - g.center[a]) * (x[a] - g.center[a]);
          return g.amplitude * std::exp(-0.5 * r2 / (g.width * g.width));
        } else if constexpr (std::is_same_v<T, Indicator>) {
          for (std::size_t a = 0; a < x.size(); ++a) {
            if (!(x[a] >= g.lower[a] && x[a] < g.upper[a])) return 0.0;
          }
          return g.amplitude;
        } else {
          std::size_t index = 0;
          for (std::size_t a = 0; a < x.size(); ++a) {
            if (!(x[a] >= 0.0 && x[a] <= g.extents[a])) return 0.0;
            const int i = std::min(g.cells[a] - 1, static_cast<int>(x[a] / g.extents[a] * g.cells[a]));
            index = index * static_cast<std::size_t>(g.cells[a]) + static_cast<std::size_t>(i);
          }
          return g.values[index];
        }
      },
      f_);
}

double TestFunction::sup_abs() const noexcept {
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Tabulated>) {
          double m = 0.0;
          for (double v : g.values) m = std::max(m, std::abs(v));
          return m;
        } else {
          return std::abs(g.amplitude);
        }
      },
      f_);
}

TestFunction TestFunction::scaled(double factor) const {
  Variant v = f_;
  std::visit(
      [factor](auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Tabulated>) {
          for (double& x : g.values) x *= factor;
        } else {
          g.amplitude *= factor;
        }
      },
      v);
  return TestFunction(std::move(v));
}

void TestFunction::support(const Window& window, std::vector<double>& lower,
                           std::vector<double>& upper) const {
  if (window.dimension() != dimension_) {
    throw ParameterError("test function dimension does not match the window");
  }
  const auto d = static_cast<std::size_t>(dimension_);
  lower.assign(d, 0.0);
  upper = window.extents();
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        for (std::size_t a = 0; a < d; ++a) {
          if constexpr (std::is_same_v<T, Gaussian>) {
            lower[a] = std::max(lower[a], g.center[a] - kGaussianReach * g.width);
            upper[a] = std::min(upper[a], g.center[a] + kGaussianReach * g.width);
          } else if constexpr (std::is_same_v<T, Indicator>) {
            lower[a] = std::max(lower[a], g.lower[a]);
            upper[a] = std::min(upper[a], g.upper[a]);
          } else {
            upper[a] = std::min(upper[a], g.extents[a]);
          }
        }
      },
      f_);
  for (std::size_t a = 0; a < d; ++a) {
    if (!(upper[a] > lower[a])) throw ParameterError("test function support misses the window");
  }
}

std::string TestFunction::describe() const {
  return std::visit(
      [](const auto& g) -> std::string {
        using T = std::decay_t<decltype(g)>;
        std::ostringstream os;
        os.precision(17);
        if constexpr (std::is_same_v<T, Gaussian>) {
          os << "gaussian:center=" << join(g.center) << ";width=" << g.width
             << ";amplitude=" << g.amplitude;
        } else if constexpr (std::is_same_v<T, Indicator>) {
          os << "indicator:lower=" << join(g.lower) << ";upper=" << join(g.upper)
             << ";amplitude=" << g.amplitude;
        } else {
          std::vector<double> cells(g.cells.begin(), g.cells.end());
          os << "tabulated:extents=" << join(g.extents) << ";cells=" << join(cells)
             << ";values=" << join(g.values);
        }
        return os.str();
      },
      f_);
}

std::string_view to_string(FunctionalMethod m) {
  switch (m) {
    case FunctionalMethod::series:
      return "series";
    case FunctionalMethod::fredholm:
      return "fredholm";
    case FunctionalMethod::empirical:
      return "empirical";
  }
  return "unknown";
}

// --- series ---------------------------------------------------------------

double fermion_tail_bound(double c, int n_max) {
  if (c <= 0.0) return 0.0;
  double sum = 0.0;
  const double log_c = std::log(c);
  for (int n = n_max + 1; n < 100000; ++n) {
    const double log_term = n * log_c + 0.5 * n * std::log(static_cast<double>(n)) - log_factorial(n);
    const double term = std::exp(log_term);
    sum += term;
    // Terms decrease once sqrt(n) > e c; stop when they no longer matter.
    if (static_cast<double>(n) > std::exp(2.0) * c * c + 1.0 && term < 1e-17 * std::max(sum, 1e-300)) {
      break;
    }
  }
  return sum;
}

double boson_tail_bound(double c, double a, int n_max) {
  if (c <= 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  if (c < 1.0) best = std::pow(c, n_max + 1) / (1.0 - c);
  if (a > 0.0 && a < 1.0) {
    constexpr int kSteps = 4000;
    const double hi = 1.0 / a;
    for (int i = 1; i < kSteps; ++i) {
      const double r = 1.0 + (hi - 1.0) * i / kSteps;
      const double log_bound = -(c / a) * std::log1p(-r * a) - (n_max + 1) * std::log(r) -
                               std::log1p(-1.0 / r);
      best = std::min(best, std::exp(log_bound));
    }
  }
  return best;
}

FunctionalValue characteristic_series(const Kernel& kernel, const TestFunction& f,
                                      const GridDiscretization& grid, int n_max,
                                      const SeriesOptions& options) {
  if (n_max < 0 || n_max > kMaxSeriesOrder) {
    throw ParameterError("series order must lie in [0, " + std::to_string(kMaxSeriesOrder) + "]");
  }
  if (kernel.dimension() != grid.dimension() || f.dimension() != grid.dimension()) {
    throw ParameterError("kernel, test function and grid dimensions must agree");
  }
  if (options.randomizations < 2 || options.qmc_nodes < static_cast<std::size_t>(options.randomizations)) {
    throw ParameterError("quasi-Monte-Carlo needs >= 2 randomizations and one node each");
  }
  const bool fermion = kernel.statistics() == Statistics::fermion;
  const auto d = static_cast<std::size_t>(grid.dimension());
  const double h = grid.cell_volume();

  std::vector<std::size_t> active;
  std::vector<Complex> u;
  double u_l1 = 0.0;
  double u_max = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Complex uc = phase_minus_one(f(grid.center(c)));
    if (uc == Complex(0.0, 0.0)) continue;
    active.push_back(c);
    u.push_back(uc);
    u_l1 += std::abs(uc) * h;
    u_max = std::max(u_max, std::abs(uc));
  }

  FunctionalValue out;
  out.method = FunctionalMethod::series;
  out.n_max = n_max;
  out.terms.assign(static_cast<std::size_t>(n_max) + 1, Complex(0.0, 0.0));
  out.term_errors.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  out.terms[0] = 1.0;

  const double c = kernel.sup_bound() * u_l1;
  out.tail_bound = fermion ? fermion_tail_bound(c, n_max)
                           : boson_tail_bound(c, u_max * kernel.density().supremum(), n_max);
  out.truncation_warning = out.tail_bound > options.tail_tolerance;

  if (n_max >= 1) {
    Complex s{0.0, 0.0};
    for (const Complex& uc : u) s += uc;
    out.terms[1] = kernel.kappa0() * h * s;
  }
  if (n_max >= 2 && !active.empty()) {
    const RealMatrix k = kernel_on_grid(kernel, grid);
    const double sign = fermion ? -1.0 : 1.0;
    const double k00 = kernel.kappa0() * kernel.kappa0();
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < active.size(); ++i) {
      Complex row{0.0, 0.0};
      for (std::size_t j = 0; j < active.size(); ++j) {
        const double kij = k(static_cast<Eigen::Index>(active[i]), static_cast<Eigen::Index>(active[j]));
        row += u[j] * (k00 + sign * kij * kij);
      }
      s += u[i] * row;
    }
    out.terms[2] = 0.5 * h * h * s;
  }

  if (n_max >= 3 && !active.empty()) {
    std::vector<double> lower, upper;
    f.support(grid.window(), lower, upper);
    double box = 1.0;
    double diag2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      box *= upper[a] - lower[a];
      diag2 += (upper[a] - lower[a]) * (upper[a] - lower[a]);
    }
    const RadialLookup kappa(kernel, std::sqrt(diag2));
    const auto reps = static_cast<std::size_t>(options.randomizations);
    const std::size_t per_rep = options.qmc_nodes / reps;

    for (int n = 3; n <= n_max; ++n) {
      const auto nn = static_cast<std::size_t>(n);
      const std::size_t dims = nn * d;
      std::vector<Complex> estimates(reps);
      std::vector<double> x(dims), shift(dims), diff(d);
      RealMatrix m(n, n);
      std::vector<double> point_f(nn);
      for (std::size_t r = 0; r < reps; ++r) {
        Philox4x32 rng(options.seed, replica_stream(r * 64 + nn, kSeriesStream));
        for (double& s : shift) s = rng.uniform();
        boost::random::sobol sobol(dims);
        Complex sum{0.0, 0.0};
        for (std::size_t node = 0; node < per_rep; ++node) {
          for (std::size_t k = 0; k < dims; ++k) {
            double q = static_cast<double>(sobol() >> 11) * 0x1.0p-53 + shift[k];
            if (q >= 1.0) q -= 1.0;
            const std::size_t a = k % d;
            x[k] = lower[a] + q * (upper[a] - lower[a]);
          }
          Complex weight{1.0, 0.0};
          for (std::size_t p = 0; p < nn; ++p) {
            point_f[p] = f(std::span<const double>(x).subspan(p * d, d));
            weight *= phase_minus_one(point_f[p]);
          }
          if (weight == Complex(0.0, 0.0)) continue;
          for (int i = 0; i < n; ++i) {
            m(i, i) = kernel.kappa0();
            for (int j = i + 1; j < n; ++j) {
              double r2 = 0.0;
              for (std::size_t a = 0; a < d; ++a) {
                const double dx = x[static_cast<std::size_t>(i) * d + a] - x[static_cast<std::size_t>(j) * d + a];
                r2 += dx * dx;
              }
              m(i, j) = m(j, i) = kappa(std::sqrt(r2));
            }
          }
          sum += weight * (fermion ? determinant(m) : permanent(m));
        }
        estimates[r] = sum / static_cast<double>(per_rep) * std::pow(box, n) *
                       std::exp(-log_factorial(n));
      }
      Complex mean{0.0, 0.0};
      for (const Complex& e : estimates) mean += e;
      mean /= static_cast<double>(reps);
      double var = 0.0;
      for (const Complex& e : estimates) var += std::norm(e - mean);
      var /= static_cast<double>(reps - 1);
      out.terms[nn] = mean;
      out.term_errors[nn] = std::sqrt(var / static_cast<double>(reps));
    }
  }

  out.value = Complex(0.0, 0.0);
  double err2 = 0.0;
  for (std::size_t n = 0; n < out.terms.size(); ++n) {
    out.value += out.terms[n];
    err2 += out.term_errors[n] * out.term_errors[n];
  }
  out.error_estimate = std::sqrt(err2);
  return out;
}

// --- Fredholm -------------------------------------------------------------

namespace {

FunctionalValue fredholm_impl(const RealMatrix& matrix, std::span<const double> f,
                              Statistics statistics, double spectral_norm) {
  const Eigen::Index n = matrix.rows();
  if (matrix.cols() != n || static_cast<Eigen::Index>(f.size()) != n) {
    throw ParameterError("Fredholm form needs a square matrix and one f value per cell");
  }
  ComplexVector u(n);
  double u_max = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    u(i) = phase_minus_one(f[static_cast<std::size_t>(i)]);
    u_max = std::max(u_max, std::abs(u(i)));
  }
  const ComplexMatrix a = u.asDiagonal() * matrix.cast<Complex>();
  FunctionalValue out;
  out.method = FunctionalMethod::fredholm;
  if (statistics == Statistics::fermion) {
    out.value = determinant(ComplexMatrix(ComplexMatrix::Identity(n, n) + a));
    return out;
  }
  if (spectral_norm < 0.0) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(matrix, Eigen::EigenvaluesOnly);
    spectral_norm = solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  if (u_max * spectral_norm >= kMaxBosonResolventNorm) {
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    const double norm = svd.singularValues()(0);
    if (norm >= kMaxBosonResolventNorm) {
      throw DivergenceError("||D_u M|| = " + std::to_string(norm) + " >= " +
                            std::to_string(kMaxBosonResolventNorm) +
                            "; the boson resolvent series does not converge safely");
    }
  }
  out.value = 1.0 / determinant(ComplexMatrix(ComplexMatrix::Identity(n, n) - a));
  return out;
}

}  // namespace

FunctionalValue fredholm_value(const RealMatrix& matrix, std::span<const double> f_at_centers,
                               Statistics statistics) {
  return fredholm_impl(matrix, f_at_centers, statistics, -1.0);
}

FunctionalValue fredholm_value(const DiscretizedKernel& kernel, const TestFunction& f) {
  std::vector<double> values(kernel.grid.size());
  for (std::size_t c = 0; c < values.size(); ++c) values[c] = f(kernel.grid.center(c));
  const double norm = kernel.eigenvalues.size() > 0 ? kernel.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return fredholm_impl(kernel.matrix, values, kernel.statistics, norm);
}

// --- empirical ------------------------------------------------------------

FunctionalValue empirical_characteristic(std::span<const Configuration> configs,
                                         const TestFunction& f) {
  if (configs.size() < 2) throw ParameterError("empirical functional needs at least 2 replicas");
  std::vector<Complex> z(configs.size());
  Complex mean{0.0, 0.0};
  for (std::size_t r = 0; r < configs.size(); ++r) {
    double s = 0.0;
    for (std::size_t p = 0; p < configs[r].size(); ++p) s += f(configs[r].point(p));
    z[r] = std::polar(1.0, s);
    mean += z[r];
  }
  const auto n = static_cast<double>(configs.size());
  mean /= n;
  double var = 0.0;
  for (const Complex& v : z) var += std::norm(v - mean);
  var /= n - 1.0;
  FunctionalValue out;
  out.method = FunctionalMethod::empirical;
  out.value = mean;
  out.replicas = configs.size();
  out.error_estimate = std::sqrt(var / n);
  return out;
}

}  // namespace quasifree
