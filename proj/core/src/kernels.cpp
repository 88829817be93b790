// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include "quasifree/kernels.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "quasifree/error.hpp"

namespace quasifree {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Angular average of e^{i lambda.x} over the sphere |lambda| = s, as a function of t = s|x|.
double plane_wave_average(double t, int d) {
  if (t < 1e-4) return 1.0 - t * t / (2.0 * d);
  switch (d) {
    case 1:
      return std::cos(t);
    case 2:
      return std::cyl_bessel_j(0.0, t);
    case 3:
      return std::sin(t) / t;
    default: {
      const double nu = 0.5 * d - 1.0;
      return std::tgamma(0.5 * d) * std::pow(0.5 * t, -nu) * std::cyl_bessel_j(nu, t);
    }
  }
}

// \int_R^\infty s^{d-1} e^{-a s^2} ds, scaled by e^{log_prefactor}.
double gaussian_radial_tail(int d, double a, double radius, double log_prefactor) {
  const double h = 0.5 * d;
  const double q = boost::math::gamma_q(h, a * radius * radius);
  if (q == 0.0) return 0.0;
  return std::exp(log_prefactor + std::log(0.5) - h * std::log(a) + std::lgamma(h) + std::log(q));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

double table_value(const Tabulated& t, double s) {
  const auto& r = t.radii;
  if (s < r.front() || s > r.back()) return 0.0;
  auto it = std::upper_bound(r.begin(), r.end(), s);
  if (it == r.end()) return t.values.back();
  const auto hi = static_cast<std::size_t>(it - r.begin());
  if (hi == 0) return t.values.front();
  const std::size_t lo = hi - 1;
  const double w = (s - r[lo]) / (r[hi] - r[lo]);
  return (1.0 - w) * t.values[lo] + w * t.values[hi];
}

// Composite 20-point Gauss-Legendre over [0, R] with panels split at `breaks`,
// doubled until two successive totals agree.
template <class F>
double radial_integral(F&& integrand, double upper, std::vector<double> breaks, double oscillation,
                       const QuadratureOptions& opt) {
  if (upper <= 0.0) return 0.0;
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                              [&](double b) { return b <= 0.0 || b >= upper; }),
               breaks.end());
  breaks.push_back(0.0);
  breaks.push_back(upper);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  using GL = boost::math::quadrature::gauss<double, 20>;
  auto evaluate = [&](int refinement) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      const double a = breaks[k];
      const double b = breaks[k + 1];
      const double len = b - a;
      // one panel per ~pi of phase, at least 4 panels per segment
      const auto base =
          static_cast<long>(std::max(4.0, std::ceil(len * std::max(oscillation, 1.0) / kPi)));
      const long panels = base << refinement;
      const double w = len / static_cast<double>(panels);
      for (long p = 0; p < panels; ++p) {
        const double lo = a + w * static_cast<double>(p);
        total += GL::integrate(integrand, lo, lo + w);
      }
    }
    return total;
  };

  double previous = evaluate(0);
  for (int level = 1; level <= opt.max_refinements; ++level) {
    const double current = evaluate(level);
    if (std::abs(current - previous) <= opt.tolerance * std::max(1.0, std::abs(current))) {
      return current;
    }
    previous = current;
  }
  throw AccuracyError("radial quadrature did not converge to " + std::to_string(opt.tolerance) +
                      " after " + std::to_string(opt.max_refinements) + " panel doublings");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::stringstream ss(text);
  while (std::getline(ss, token, ',')) {
    std::stringstream ts(token);
    double v = 0.0;
    while (ts >> v) out.push_back(v);
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ParameterError("density config is missing key '" + key + "'");
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::logic_error&) {
    throw ParameterError("density config key '" + key + "' is not a number: " + it->second);
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string_view to_string(Statistics s) {
  return s == Statistics::fermion ? "fermion" : "boson";
}

Statistics parse_statistics(std::string_view name) {
  if (name == "fermion") return Statistics::fermion;
  if (name == "boson") return Statistics::boson;
  throw ParameterError("unknown statistics '" + std::string(name) + "' (expected fermion|boson)");
}

std::string_view to_string(KernelMethod m) {
  switch (m) {
    case KernelMethod::automatic:
      return "automatic";
    case KernelMethod::closed_form:
      return "closed_form";
    case KernelMethod::quadrature:
      return "quadrature";
  }
  return "unknown";
}

double unit_sphere_area(int dimension) {
  const double h = 0.5 * dimension;
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

// --- MomentumDensity -------------------------------------------------------

MomentumDensity::MomentumDensity(DensityFamily family, int dimension, Statistics statistics)
    : family_(std::move(family)), dimension_(dimension), statistics_(statistics) {
  require(dimension_ >= 1, "dimension must be a positive integer");
  std::visit(Overloaded{
                 [](const FermiDirac& p) {
                   require(p.beta > 0.0, "fermi_dirac: beta must be positive");
                   require(p.mass > 0.0, "fermi_dirac: mass must be positive");
                   require(std::isfinite(p.mu), "fermi_dirac: mu must be finite");
                 },
                 [](const ZeroTemperature& p) {
                   require(p.kf > 0.0, "zero_temp: k_f must be positive");
                 },
                 [](const Bose& p) {
                   require(p.beta > 0.0, "bose: beta must be positive");
                   require(p.activity >= 0.0, "bose: activity z must be non-negative");
                   if (p.activity >= 1.0) {
                     throw DivergenceError("bose: activity z >= 1 makes the density non-integrable");
                   }
                 },
                 [](const Tabulated& t) {
                   require(t.radii.size() >= 2, "tabulated: need at least two grid points");
                   require(t.radii.size() == t.values.size(),
                           "tabulated: radii and values differ in length");
                   require(t.radii.front() >= 0.0, "tabulated: radii must be non-negative");
                   for (std::size_t i = 1; i < t.radii.size(); ++i) {
                     require(t.radii[i] > t.radii[i - 1], "tabulated: radii must increase");
                   }
                   for (double v : t.values) require(std::isfinite(v), "tabulated: non-finite value");
                 },
             },
             family_);
}

double MomentumDensity::radial(double s) const {
  return std::visit(Overloaded{
                        [&](const FermiDirac& p) { return fermi_dirac_density(s, p.beta, p.mu, p.mass); },
                        [&](const ZeroTemperature& p) { return s < p.kf ? 1.0 : 0.0; },
                        [&](const Bose& p) {
                          const double w = p.activity * std::exp(-p.beta * s * s);
                          return w / (1.0 - w);
                        },
                        [&](const Tabulated& t) { return table_value(t, s); },
                    },
                    family_);
}

double MomentumDensity::operator()(std::span<const double> momentum) const {
  return radial(norm(momentum));
}

std::string MomentumDensity::family_name() const {
  return std::visit(Overloaded{
                        [](const FermiDirac&) { return std::string("fermi_dirac"); },
                        [](const ZeroTemperature&) { return std::string("zero_temp"); },
                        [](const Bose&) { return std::string("bose"); },
                        [](const Tabulated&) { return std::string("tabulated"); },
                    },
                    family_);
}

double MomentumDensity::supremum() const {
  return std::visit(Overloaded{
                        [](const FermiDirac& p) { return fermi_dirac_density(0.0, p.beta, p.mu, p.mass); },
                        [](const ZeroTemperature&) { return 1.0; },
                        [](const Bose& p) { return p.activity / (1.0 - p.activity); },
                        [](const Tabulated& t) {
                          return std::max(0.0, *std::max_element(t.values.begin(), t.values.end()));
                        },
                    },
                    family_);
}

double MomentumDensity::tail_mass_bound(double radius) const {
  const int d = dimension_;
  const double area = unit_sphere_area(d);
  return std::visit(
      Overloaded{
          [&](const FermiDirac& p) {
            const double a = p.beta / (2.0 * p.mass);
            // k_hat <= exp(beta mu - a s^2)
            return area * gaussian_radial_tail(d, a, radius, p.beta * p.mu);
          },
          [&](const ZeroTemperature& p) {
            if (radius >= p.kf) return 0.0;
            return area * (std::pow(p.kf, d) - std::pow(radius, d)) / d;
          },
          [&](const Bose& p) {
            if (p.activity == 0.0) return 0.0;
            return area * gaussian_radial_tail(d, p.beta, radius,
                                               std::log(p.activity / (1.0 - p.activity)));
          },
          [&](const Tabulated& t) {
            const double end = t.radii.back();
            if (radius >= end) return 0.0;
            double peak = 0.0;
            for (double v : t.values) peak = std::max(peak, std::abs(v));
            return area * peak * (std::pow(end, d) - std::pow(radius, d)) / d;
          },
      },
      family_);
}

double MomentumDensity::truncation_radius(double tolerance) const {
  if (const auto* z = std::get_if<ZeroTemperature>(&family_)) return z->kf;
  if (const auto* t = std::get_if<Tabulated>(&family_)) return t->radii.back();
  if (const auto* b = std::get_if<Bose>(&family_); b != nullptr && b->activity == 0.0) return 0.0;
  double hi = 1.0;
  while (tail_mass_bound(hi) >= tolerance) {
    hi *= 2.0;
    if (hi > 1e12) throw AccuracyError("density tail does not decay below tolerance");
  }
  double lo = 0.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tail_mass_bound(mid) < tolerance ? hi : lo) = mid;
  }
  return hi;
}

std::vector<double> MomentumDensity::breakpoints() const {
  return std::visit(Overloaded{
                        [](const FermiDirac& p) {
                          std::vector<double> b;
                          if (p.mu > 0.0) b.push_back(std::sqrt(2.0 * p.mass * p.mu));
                          return b;
                        },
                        [](const ZeroTemperature& p) { return std::vector<double>{p.kf}; },
                        [](const Bose&) { return std::vector<double>{}; },
                        [](const Tabulated& t) { return t.radii; },
                    },
                    family_);
}

// --- closed forms ----------------------------------------------------------

double fermi_dirac_density(double momentum_norm, double beta, double mu, double mass) {
  if (!(beta > 0.0)) throw ParameterError("fermi_dirac: beta must be positive");
  if (!(mass > 0.0)) throw ParameterError("fermi_dirac: mass must be positive");
  const double t = beta * mu - beta * momentum_norm * momentum_norm / (2.0 * mass);
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double zero_temp_kernel_1d(double r, double kf) {
  if (!(kf > 0.0)) throw ParameterError("zero_temp: k_f must be positive");
  const double z = kf * std::abs(r);
  if (z < 1e-3) {
    const double z2 = z * z;
    return kf / kPi * (1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0);
  }
  return std::sin(kf * r) / (kPi * r);
}

double zero_temp_kernel_2d(double r, double kf) {
  if (!(kf > 0.0)) throw ParameterError("zero_temp: k_f must be positive");
  const double z = kf * std::abs(r);
  const double scale = kf * kf / (4.0 * kPi);
  if (z < 1e-3) {
    const double z2 = z * z;
    return scale * (1.0 - z2 / 8.0 + z2 * z2 / 192.0 - z2 * z2 * z2 / 9216.0);
  }
  return kf * std::cyl_bessel_j(1.0, z) / (2.0 * kPi * std::abs(r));
}

double zero_temp_kernel_3d_radial(double r, double kf) {
  if (!(kf > 0.0)) throw ParameterError("zero_temp: k_f must be positive");
  const double rho = kf * kf * kf / (6.0 * kPi * kPi);
  const double z = kf * std::abs(r);
  if (z < 1e-3) {
    const double z2 = z * z;
    return rho * (1.0 - z2 / 10.0 + z2 * z2 / 280.0 - z2 * z2 * z2 / 15120.0);
  }
  return 3.0 * rho * (std::sin(z) - z * std::cos(z)) / (z * z * z);
}

double zero_temp_kernel_3d(std::span<const double> x, double kf) {
  if (x.size() != 3) throw ParameterError("zero_temp_kernel_3d expects a 3-vector");
  return zero_temp_kernel_3d_radial(norm(x), kf);
}

BoseSeries bose_kernel(double r, double beta, double activity, int dimension, double tolerance) {
  if (!(beta > 0.0)) throw ParameterError("bose: beta must be positive");
  if (dimension < 1) throw ParameterError("bose: dimension must be positive");
  if (activity < 0.0) throw ParameterError("bose: activity z must be non-negative");
  if (activity >= 1.0) throw DivergenceError("bose: series diverges for activity z >= 1");
  BoseSeries out;
  if (activity == 0.0) return out;
  const double half_d = 0.5 * dimension;
  const double lead = std::pow(4.0 * kPi * beta, -half_d);
  // tail after N terms: z^{N+1} / (1 - z) * (4 pi beta)^{-d/2}
  const double r2 = r * r;
  double zn = 1.0;
  for (int n = 1;; ++n) {
    zn *= activity;
    out.value += zn * lead * std::pow(static_cast<double>(n), -half_d) * std::exp(-r2 / (4.0 * n * beta));
    out.terms = n;
    out.tail_bound = zn * activity / (1.0 - activity) * lead;
    if (out.tail_bound < tolerance || n >= 10'000'000) break;
  }
  return out;
}

bool has_closed_form(const MomentumDensity& density) {
  return std::visit(Overloaded{
                        [&](const FermiDirac& p) { return p.mu < 0.0; },
                        [&](const ZeroTemperature&) { return density.dimension() <= 3; },
                        [](const Bose&) { return true; },
                        [](const Tabulated&) { return false; },
                    },
                    density.family());
}

std::optional<double> closed_form_kernel(const MomentumDensity& density, double r) {
  if (!has_closed_form(density)) return std::nullopt;
  const int d = density.dimension();
  return std::visit(
      Overloaded{
          [&](const FermiDirac& p) -> std::optional<double> {
            // k_hat = sum_n (-1)^{n+1} e^{n beta mu} e^{-n beta s^2 / 2m}, convergent for mu < 0
            const double q = std::exp(p.beta * p.mu);
            double sum = 0.0;
            double qn = 1.0;
            for (int n = 1; n < 10'000'000; ++n) {
              qn *= q;
              const double width = 2.0 * kPi * n * p.beta / p.mass;
              const double term = qn * std::pow(width, -0.5 * d) *
                                  std::exp(-r * r * p.mass / (2.0 * n * p.beta));
              sum += (n % 2 == 1) ? term : -term;
              if (qn * q * std::pow(2.0 * kPi * (n + 1) * p.beta / p.mass, -0.5 * d) < 1e-17) break;
            }
            return sum;
          },
          [&](const ZeroTemperature& p) -> std::optional<double> {
            switch (d) {
              case 1:
                return zero_temp_kernel_1d(r, p.kf);
              case 2:
                return zero_temp_kernel_2d(r, p.kf);
              default:
                return zero_temp_kernel_3d_radial(r, p.kf);
            }
          },
          [&](const Bose& p) -> std::optional<double> {
            return bose_kernel(r, p.beta, p.activity, d).value;
          },
          [](const Tabulated&) -> std::optional<double> { return std::nullopt; },
      },
      density.family());
}

// --- quadrature ------------------------------------------------------------

double kernel_from_density(const MomentumDensity& density, double r, const QuadratureOptions& options) {
  const int d = density.dimension();
  const double upper = density.truncation_radius(options.tail_tolerance);
  const double prefactor = unit_sphere_area(d) * std::pow(2.0 * kPi, -d);
  r = std::abs(r);
  auto integrand = [&](double s) {
    return density.radial(s) * std::pow(s, d - 1) * plane_wave_average(s * r, d);
  };
  return prefactor * radial_integral(integrand, upper, density.breakpoints(), r, options);
}

double kernel_from_density(const MomentumDensity& density, std::span<const double> x,
                           const QuadratureOptions& options) {
  if (static_cast<int>(x.size()) != density.dimension()) {
    throw ParameterError("position has dimension " + std::to_string(x.size()) +
                         ", density has dimension " + std::to_string(density.dimension()));
  }
  return kernel_from_density(density, norm(x), options);
}

double density_l1_norm(const MomentumDensity& density, const QuadratureOptions& options) {
  const int d = density.dimension();
  const double upper = density.truncation_radius(options.tail_tolerance);
  auto integrand = [&](double s) { return std::abs(density.radial(s)) * std::pow(s, d - 1); };
  return unit_sphere_area(d) * radial_integral(integrand, upper, density.breakpoints(), 0.0, options);
}

// --- validation ------------------------------------------------------------

DensityReport inspect_density(const MomentumDensity& density, std::size_t samples) {
  DensityReport rep;
  rep.statistics = density.statistics();
  const double upper = std::max(density.truncation_radius(1e-10), 1e-12);
  std::vector<double> grid;
  grid.reserve(samples + 16);
  const std::size_t n = std::max<std::size_t>(samples, 2);
  for (std::size_t k = 0; k < n; ++k) {
    grid.push_back(upper * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  for (double b : density.breakpoints()) {
    grid.push_back(b);
    grid.push_back(std::nextafter(b, 0.0));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const bool fermion = density.statistics() == Statistics::fermion;
  rep.bound = fermion ? 1.0 : density.supremum();
  rep.minimum = std::numeric_limits<double>::infinity();
  rep.maximum = -std::numeric_limits<double>::infinity();
  constexpr double slack = 1e-12;
  constexpr std::size_t kMaxListed = 5;
  for (double s : grid) {
    const double v = density.radial(s);
    rep.minimum = std::min(rep.minimum, v);
    rep.maximum = std::max(rep.maximum, v);
    const bool bad = v < -slack || !std::isfinite(v) || (fermion && v > 1.0 + slack);
    if (bad) {
      ++rep.offending_count;
      if (rep.offending_radii.size() < kMaxListed) rep.offending_radii.push_back(s);
    }
  }
  rep.l1_norm = density_l1_norm(density);
  rep.tail_bound = density.tail_mass_bound(upper);
  if (!fermion && !std::isfinite(rep.bound)) rep.offending_count += 1;

  rep.passed = rep.offending_count == 0;
  if (rep.passed) {
    rep.message = fermion ? "density satisfies 0 <= k_hat <= 1 and is integrable"
                          : "density satisfies 0 <= k_hat <= C and is integrable";
  } else {
    std::ostringstream os;
    os << (fermion ? "fermion density violates 0 <= k_hat <= 1"
                   : "boson density violates 0 <= k_hat <= C");
    os << " (range [" << rep.minimum << ", " << rep.maximum << "]) at |lambda| =";
    for (std::size_t i = 0; i < rep.offending_radii.size(); ++i) {
      os << (i ? ", " : " ") << rep.offending_radii[i];
    }
    if (rep.offending_count > rep.offending_radii.size()) {
      os << " ... (" << rep.offending_count << " grid points)";
    }
    rep.message = os.str();
  }
  return rep;
}

DensityReport validate_density(const MomentumDensity& density, std::size_t samples) {
  auto rep = inspect_density(density, samples);
  if (!rep.passed) throw ConstraintViolation(rep.message);
  return rep;
}

// --- Kernel ----------------------------------------------------------------

Kernel::Kernel(MomentumDensity density, KernelMethod method, QuadratureOptions options)
    : density_(std::move(density)), method_(method), options_(options) {
  if (method_ == KernelMethod::automatic) {
    method_ = has_closed_form(density_) ? KernelMethod::closed_form : KernelMethod::quadrature;
  } else if (method_ == KernelMethod::closed_form && !has_closed_form(density_)) {
    throw ParameterError("density family '" + density_.family_name() +
                         "' has no closed-form kernel in this configuration");
  }
  l1_norm_ = density_l1_norm(density_, options_);
  kappa0_ = at_radius(0.0);
}

double Kernel::at_radius(double r) const {
  if (method_ == KernelMethod::closed_form) return *closed_form_kernel(density_, r);
  return kernel_from_density(density_, r, options_);
}

double Kernel::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != density_.dimension()) {
    throw ParameterError("position has dimension " + std::to_string(x.size()) +
                         ", kernel has dimension " + std::to_string(density_.dimension()));
  }
  return at_radius(norm(x));
}

double Kernel::sup_bound() const noexcept {
  return std::pow(2.0 * kPi, -density_.dimension()) * l1_norm_;
}

// --- configuration -----------------------------------------------------------

MomentumDensity parse_density_config(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("density config line " + std::to_string(lineno) + " is not key = value");
    }
    kv[trim(std::string_view(t).substr(0, eq))] = trim(std::string_view(t).substr(eq + 1));
  }
  if (kv.count("d") && !kv.count("dimension")) kv["dimension"] = kv["d"];
  if (kv.count("activity") && !kv.count("z")) kv["z"] = kv["activity"];
  if (kv.count("m") && !kv.count("mass")) kv["mass"] = kv["m"];

  auto family_it = kv.find("family");
  if (family_it == kv.end()) throw ParameterError("density config is missing key 'family'");
  const std::string& family = family_it->second;

  const int dimension = kv.count("dimension") ? static_cast<int>(parse_number(kv, "dimension")) : 1;
  Statistics statistics = family == "bose" ? Statistics::boson : Statistics::fermion;
  if (auto s = kv.find("statistics"); s != kv.end()) statistics = parse_statistics(s->second);

  DensityFamily fam;
  if (family == "fermi_dirac") {
    fam = FermiDirac{parse_number(kv, "beta"), parse_number(kv, "mu"),
                     kv.count("mass") ? parse_number(kv, "mass") : 1.0};
  } else if (family == "zero_temp") {
    fam = ZeroTemperature{parse_number(kv, "kf")};
  } else if (family == "bose") {
    fam = Bose{parse_number(kv, "beta"), parse_number(kv, "z")};
  } else if (family == "tabulated") {
    if (!kv.count("radii") || !kv.count("values")) {
      throw ParameterError("tabulated density needs 'radii' and 'values'");
    }
    fam = Tabulated{parse_list(kv["radii"]), parse_list(kv["values"])};
  } else {
    throw ParameterError("unknown density family '" + family +
                         "' (expected fermi_dirac|zero_temp|bose|tabulated)");
  }
  return MomentumDensity(std::move(fam), dimension, statistics);
}

MomentumDensity load_density_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read density config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_density_config(buffer.str());
}

std::string to_config_string(const MomentumDensity& density) {
  std::ostringstream os;
  os << "family = " << density.family_name() << "\n";
  os << "statistics = " << to_string(density.statistics()) << "\n";
  os << "dimension = " << density.dimension() << "\n";
  std::visit(Overloaded{
                 [&](const FermiDirac& p) {
                   os << "beta = " << format_double(p.beta) << "\nmu = " << format_double(p.mu)
                      << "\nmass = " << format_double(p.mass) << "\n";
                 },
                 [&](const ZeroTemperature& p) { os << "kf = " << format_double(p.kf) << "\n"; },
                 [&](const Bose& p) {
                   os << "beta = " << format_double(p.beta) << "\nz = " << format_double(p.activity)
                      << "\n";
                 },
                 [&](const Tabulated& t) {
                   auto join = [&](const std::vector<double>& v) {
                     std::string s;
                     for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
                     return s;
                   };
                   os << "radii = " << join(t.radii) << "\nvalues = " << join(t.values) << "\n";
                 },
             },
             density.family());
  return os.str();
}

}  // namespace quasifree
