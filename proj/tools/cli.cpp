// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "quasifree/algebra.hpp"
#include "quasifree/correlations.hpp"
#include "quasifree/error.hpp"
#include "quasifree/functionals.hpp"
#include "quasifree/kernels.hpp"
#include "quasifree/rng.hpp"
#include "quasifree/samplers.hpp"

namespace quasifree::cli {

namespace {

using json = nlohmann::json;

constexpr const char* kVersion = "0.1.0";

/// Bad flag values, unreadable inputs.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  std::string_view s(text);
  while (true) {
    const auto comma = s.find(',');
    std::string_view item = s.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || item.empty()) {
      throw UsageError(std::string("invalid ") + what + " '" + text + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<double> broadcast(std::vector<double> v, std::size_t d, const char* what) {
  if (v.size() == 1 && d > 1) v.assign(d, v[0]);
  if (v.size() != d) {
    throw UsageError(std::string(what) + " needs 1 or " + std::to_string(d) + " values");
  }
  return v;
}

std::vector<int> to_ints(const std::vector<double>& v, const char* what) {
  std::vector<int> out;
  for (double x : v) {
    if (x != std::floor(x) || x < 1) throw UsageError(std::string(what) + " must be positive integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

json complex_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

void write_json(const std::string& path, const json& j, std::ostream& out) {
  write_text(path, j.dump(2) + "\n", out);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << f.rdbuf();
  return buffer.str();
}

// --- density flags ----------------------------------------------------------

struct DensityArgs {
  std::string path;
  std::string family;
  std::string statistics;
  std::optional<int> dimension;
  std::optional<double> kf, beta, mu, mass, z;
  std::string radii, values;

  void attach(CLI::App* app) {
    app->add_option("--density", path, "density config file (key = value lines)");
    app->add_option("--family", family, "fermi_dirac | zero_temp | bose | tabulated");
    app->add_option("--statistics", statistics, "fermion | boson");
    app->add_option("--d,--dimension", dimension, "spatial dimension");
    app->add_option("--kf", kf, "Fermi momentum (zero_temp)");
    app->add_option("--beta", beta, "inverse temperature");
    app->add_option("--mu", mu, "chemical potential (fermi_dirac)");
    app->add_option("--mass", mass, "particle mass (fermi_dirac)");
    app->add_option("--z,--activity", z, "activity (bose)");
    app->add_option("--radii", radii, "tabulated radii, comma separated");
    app->add_option("--values", values, "tabulated values, comma separated");
  }

  [[nodiscard]] bool given() const { return !path.empty() || !family.empty(); }

  [[nodiscard]] MomentumDensity build() const {
    if (!given()) throw UsageError("a density is required: pass --density <file> or --family");
    std::string text = path.empty() ? std::string() : read_file(path);
    text += "\n";
    auto add = [&text](const char* key, const std::string& v) { text += std::string(key) + " = " + v + "\n"; };
    if (!family.empty()) add("family", family);
    if (!statistics.empty()) add("statistics", statistics);
    if (dimension) add("dimension", std::to_string(*dimension));
    if (kf) add("kf", shortest(*kf));
    if (beta) add("beta", shortest(*beta));
    if (mu) add("mu", shortest(*mu));
    if (mass) add("mass", shortest(*mass));
    if (z) add("z", shortest(*z));
    if (!radii.empty()) add("radii", radii);
    if (!values.empty()) add("values", values);
    return parse_density_config(text);
  }
};

json density_json(const MomentumDensity& density) {
  return json{{"family", density.family_name()},
              {"statistics", std::string(to_string(density.statistics()))},
              {"dimension", density.dimension()},
              {"config", to_config_string(density)}};
}

json report_json(const DensityReport& r) {
  return json{{"minimum", r.minimum},       {"maximum", r.maximum},
              {"l1_norm", r.l1_norm},       {"tail_bound", r.tail_bound},
              {"bound", r.bound},           {"offending_count", r.offending_count},
              {"passed", r.passed},         {"message", r.message}};
}

json metadata(std::optional<std::uint64_t> seed) {
  json m{{"tool", "quasifree"}, {"version", kVersion}};
  if (seed) m["seed"] = *seed;
  return m;
}

KernelMethod parse_method(const std::string& s) {
  if (s == "auto" || s == "automatic") return KernelMethod::automatic;
  if (s == "closed_form") return KernelMethod::closed_form;
  if (s == "quadrature") return KernelMethod::quadrature;
  throw UsageError("unknown kernel method '" + s + "' (expected auto|closed_form|quadrature)");
}

// --- kernel -----------------------------------------------------------------

struct KernelArgs {
  DensityArgs density;
  std::vector<std::string> at;
  std::string range;
  std::string method = "auto";
  int digits = 5;
  std::string output;
};

int cmd_kernel(const KernelArgs& a, std::ostream& out) {
  const MomentumDensity density = a.density.build();
  validate_density(density);
  const Kernel kernel(density, parse_method(a.method));
  const auto d = static_cast<std::size_t>(density.dimension());

  if (!a.at.empty()) {
    std::string text;
    for (const auto& spec : a.at) {
      auto x = parse_doubles(spec, "--at point");
      double value = 0.0;
      if (x.size() == 1) {
        value = kernel.at_radius(std::abs(x[0]));
      } else if (x.size() == d) {
        value = kernel(x);
      } else {
        throw UsageError("--at expects a radius or " + std::to_string(d) + " coordinates");
      }
      text += format_sig(value, a.digits) + "\n";
    }
    write_text(a.output, text, out);
    return kExitOk;
  }
  if (!a.range.empty()) {
    const auto r = parse_doubles(a.range, "--range");
    if (r.size() != 3 || r[2] < 2 || !(r[1] > r[0]) || r[0] < 0.0) {
      throw UsageError("--range expects r0,r1,count with 0 <= r0 < r1 and count >= 2");
    }
    const int n = static_cast<int>(r[2]);
    std::string text = "r,kappa\n";
    for (int i = 0; i < n; ++i) {
      const double radius = r[0] + (r[1] - r[0]) * i / (n - 1);
      text += shortest(radius) + "," + shortest(kernel.at_radius(radius)) + "\n";
    }
    write_text(a.output, text, out);
    return kExitOk;
  }
  json j{{"metadata", metadata(std::nullopt)},
         {"density", density_json(density)},
         {"method", std::string(to_string(kernel.method()))},
         {"kappa0", kernel.kappa0()},
         {"l1_norm", kernel.l1_norm()},
         {"sup_bound", kernel.sup_bound()},
         {"closed_form", has_closed_form(density)},
         {"validation", report_json(inspect_density(density))}};
  write_json(a.output, j, out);
  return kExitOk;
}

// --- verify-algebra ---------------------------------------------------------

struct AlgebraArgs {
  int m = 3;
  std::uint64_t seed = 7;
  std::string statistics = "fermion";
  int order = 0;
  int cutoff = 0;
  int draws = 1;
  double max_eigenvalue = 1.0;
  std::optional<double> tolerance;
  std::string output;
};

ComplexVector random_vector(int m, Philox4x32& rng) {
  std::normal_distribution<double> normal;
  ComplexVector v(m);
  for (int i = 0; i < m; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im) / std::sqrt(2.0 * m);
  }
  return v;
}

// All nondecreasing site tuples of length n over m sites.
std::vector<std::vector<int>> site_tuples(int m, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> t(static_cast<std::size_t>(n), 0);
  while (true) {
    out.push_back(t);
    int k = n - 1;
    while (k >= 0 && t[static_cast<std::size_t>(k)] == m - 1) --k;
    if (k < 0) break;
    ++t[static_cast<std::size_t>(k)];
    for (int i = k + 1; i < n; ++i) t[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(k)];
  }
  return out;
}

struct Check {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool gate = true;
};

int cmd_verify_algebra(const AlgebraArgs& a, std::ostream& out) {
  const Statistics stats = parse_statistics(a.statistics);
  const bool fermion = stats == Statistics::fermion;
  const int order = a.order > 0 ? a.order : (fermion ? 3 : 2);
  const int cutoff = a.cutoff > 0 ? a.cutoff : default_boson_cutoff(2 * order);
  if (a.m < 1 || a.draws < 1 || order < 1) throw UsageError("--m, --draws and --order must be >= 1");

  auto tol = [&](double t) { return a.tolerance.value_or(t); };
  std::vector<Check> checks;
  auto record = [&](const std::string& name, double dev, double t, bool gate = true) {
    for (auto& c : checks) {
      if (c.name == name) {
        c.deviation = std::max(c.deviation, dev);
        return;
      }
    }
    checks.push_back({name, dev, tol(t), gate});
  };

  int cyclic = 0;
  for (int draw = 0; draw < a.draws; ++draw) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(draw);
    const KMatrix k = KMatrix::random(a.m, stats, seed, a.max_eigenvalue);
    const FieldSystem fields = fermion ? build_fermion_fields(k, FermionFockSpace(a.m))
                                       : build_boson_fields(k, BosonFockSpace(a.m, cutoff));
    Philox4x32 rng(seed, 0x5EED);

    record("field_relations", field_relation_residual(fields), 1e-12);
    std::vector<Eigen::Index> columns = fields.safe_states(2);
    record("mode_relations", mode_relation_residual(fields.modes(), stats, columns), 1e-12);

    double comm = 0.0;
    for (int i = 0; i < a.m; ++i) {
      for (int j = i + 1; j < a.m; ++j) {
        comm = std::max(comm, commutativity_check(fields, site_density(fields, i), site_density(fields, j)));
      }
    }
    std::vector<double> w1(static_cast<std::size_t>(a.m)), w2(static_cast<std::size_t>(a.m));
    for (int i = 0; i < a.m; ++i) {
      w1[static_cast<std::size_t>(i)] = rng.uniform() - 0.5;
      w2[static_cast<std::size_t>(i)] = rng.uniform() - 0.5;
    }
    comm = std::max(comm, commutativity_check(fields, density_operator(fields, w1),
                                              density_operator(fields, w2)));
    record("density_commutativity", comm, 1e-12);

    for (int n = 1; n <= order; ++n) {
      std::vector<ComplexVector> f, g;
      for (int i = 0; i < n; ++i) {
        f.push_back(random_vector(a.m, rng));
        g.push_back(random_vector(a.m, rng));
      }
      record("n_point_" + std::to_string(n), n_point_check(fields, f, g).deviation, 1e-10);

      double wick = 0.0, fact = 0.0, raw = 0.0;
      for (const auto& sites : site_tuples(a.m, n)) {
        wick = std::max(wick, wick_identity_check(fields, sites));
        fact = std::max(fact, factorial_moment(fields, sites).deviation);
        raw = std::max(raw, std::abs(raw_vacuum_moment(fields, sites) -
                                     raw_moment_from_factorial(fields, sites)));
      }
      record("wick_" + std::to_string(n), wick, 1e-11, fermion);
      record("factorial_moment_" + std::to_string(n), fact, 1e-10);
      record("raw_moment_recursion_" + std::to_string(n), raw, 1e-10);
    }
    cyclic = density_cyclic_dimension(fields, std::min(order, 3));
  }

  bool passed = true;
  json list = json::array();
  for (const auto& c : checks) {
    const bool ok = c.deviation <= c.tolerance;
    if (c.gate && !ok) passed = false;
    list.push_back(json{{"name", c.name},
                        {"max_deviation", c.deviation},
                        {"tolerance", c.tolerance},
                        {"passed", ok},
                        {"gate", c.gate}});
  }
  json config{{"m", a.m},
              {"seed", a.seed},
              {"statistics", a.statistics},
              {"order", order},
              {"draws", a.draws},
              {"max_eigenvalue", a.max_eigenvalue}};
  if (!fermion) config["cutoff"] = cutoff;
  json j{{"metadata", metadata(a.seed)},
         {"config", config},
         {"checks", list},
         {"density_cyclic_dimension", cyclic},
         {"passed", passed}};
  write_json(a.output, j, out);
  return passed ? kExitOk : kExitValidation;
}

// --- correlate --------------------------------------------------------------

struct CorrelateArgs {
  DensityArgs density;
  std::string input;
  std::string output;
};

int cmd_correlate(const CorrelateArgs& a, std::ostream& out) {
  const MomentumDensity density = a.density.build();
  validate_density(density);
  const Kernel kernel(density);
  const int d = density.dimension();

  std::istringstream in(read_file(a.input));
  std::string line;
  std::string text;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> coords;
    try {
      coords = parse_doubles(line, "point row");
    } catch (const UsageError&) {
      if (!first) throw;
      first = false;
      text += line + ",value\n";
      continue;
    }
    first = false;
    if (coords.size() % static_cast<std::size_t>(d) != 0) {
      throw UsageError("row " + std::to_string(lineno) + " has " + std::to_string(coords.size()) +
                       " coordinates, not a multiple of d = " + std::to_string(d));
    }
    const PointTuple points(d, coords);
    text += line + "," + shortest(correlation(kernel, points).value) + "\n";
  }
  write_text(a.output, text, out);
  return kExitOk;
}

// --- sample -----------------------------------------------------------------

struct SampleArgs {
  DensityArgs density;
  std::string window;
  std::string cells = "512";
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string output;
  std::string summary;
};

std::string configurations_csv(const std::vector<Configuration>& configs, Statistics stats,
                               int d, std::uint64_t seed) {
  std::string text = "# quasifree sample statistics=" + std::string(to_string(stats)) +
                     " dimension=" + std::to_string(d) + " replicas=" +
                     std::to_string(configs.size()) + " seed=" + std::to_string(seed) + "\n";
  text += "replica";
  for (int a = 0; a < d; ++a) text += ",x" + std::to_string(a);
  text += "\n";
  for (std::size_t r = 0; r < configs.size(); ++r) {
    for (std::size_t p = 0; p < configs[r].size(); ++p) {
      text += std::to_string(r);
      for (double x : configs[r].point(p)) text += "," + shortest(x);
      text += "\n";
    }
  }
  return text;
}

int cmd_sample(const SampleArgs& a, std::ostream& out) {
  if (a.output.empty()) throw UsageError("sample needs --output <csv>");
  if (a.replicas < 1) throw UsageError("--replicas must be >= 1");
  const MomentumDensity density = a.density.build();
  validate_density(density);
  const auto d = static_cast<std::size_t>(density.dimension());
  const Window window(broadcast(parse_doubles(a.window, "--window"), d, "--window"));
  const GridDiscretization grid(window, to_ints(broadcast(parse_doubles(a.cells, "--cells"), d, "--cells"), "--cells"));
  const Kernel kernel(density);

  json results;
  std::vector<Configuration> configs;
  if (density.statistics() == Statistics::fermion) {
    const DiscretizedKernel dk = discretize_kernel(kernel, grid);
    configs = sample_replicas(
        a.replicas, [&](std::uint64_t r) { return sample_fermion(dk, a.seed, r); }, a.threads);
    results["max_eigenvalue_clamp"] = dk.max_clamp;
    results["expected_count"] = dk.eigenvalues.sum();
  } else {
    const CoxSampler sampler(density, grid);
    configs = sample_replicas(
        a.replicas, [&](std::uint64_t r) { return sampler.sample(a.seed, r); }, a.threads);
    results["frequency_count"] = sampler.frequency_count();
    results["field_variance"] = sampler.spectral_variance();
    results["expected_count"] = sampler.spectral_variance() * window.volume();
  }
  write_text(a.output, configurations_csv(configs, density.statistics(), static_cast<int>(d), a.seed), out);

  std::size_t total = 0;
  for (const auto& c : configs) total += c.size();
  results["total_points"] = total;
  results["kappa0"] = kernel.kappa0();
  if (configs.size() >= 2) {
    const auto est = estimate_intensity(configs, window, std::vector<int>(d, 1));
    results["count_mean"] = est.count_mean;
    results["count_variance"] = est.count_variance;
    results["intensity"] = est.mean;
    results["intensity_stderr"] = est.mean_stderr;
  }
  json config{{"density", density_json(density)},
              {"window", window.extents()},
              {"cells", grid.cells_per_axis()},
              {"replicas", a.replicas},
              {"seed", a.seed},
              {"output", a.output}};
  write_json(a.summary, json{{"metadata", metadata(a.seed)}, {"config", config}, {"results", results}}, out);
  return kExitOk;
}

// --- estimate ---------------------------------------------------------------

struct EstimateArgs {
  DensityArgs density;
  std::string input;
  std::string window;
  std::size_t replicas = 0;
  std::string bins = "10";
  std::optional<double> r_max;
  int r_bins = 20;
  std::string edge = "translation";
  std::vector<std::string> functions;
  std::string output;
};

struct LoadedSample {
  std::vector<Configuration> configs;
  int dimension = 0;
};

LoadedSample load_sample(const std::string& path, std::size_t replicas_flag) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t declared = 0;
  int dimension = 0;
  std::vector<std::pair<std::size_t, std::vector<double>>> rows;
  std::size_t max_replica = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (auto p = line.find("replicas="); p != std::string::npos) {
        declared = std::stoul(line.substr(p + 9));
      }
      continue;
    }
    if (line.rfind("replica", 0) == 0) {
      dimension = static_cast<int>(std::count(line.begin(), line.end(), ','));
      continue;
    }
    auto v = parse_doubles(line, "sample row");
    if (v.size() < 2) throw UsageError("sample row '" + line + "' has no coordinates");
    if (dimension == 0) dimension = static_cast<int>(v.size()) - 1;
    if (static_cast<int>(v.size()) - 1 != dimension) throw UsageError("ragged sample row '" + line + "'");
    const auto r = static_cast<std::size_t>(v[0]);
    max_replica = std::max(max_replica, r);
    rows.emplace_back(r, std::vector<double>(v.begin() + 1, v.end()));
  }
  std::size_t replicas = replicas_flag ? replicas_flag : declared;
  if (replicas == 0) replicas = rows.empty() ? 0 : max_replica + 1;
  if (!rows.empty() && max_replica >= replicas) {
    throw UsageError("sample refers to replica " + std::to_string(max_replica) + " but only " +
                     std::to_string(replicas) + " replicas were declared");
  }
  LoadedSample s;
  s.dimension = dimension;
  s.configs.assign(replicas, Configuration{std::max(dimension, 1), {}});
  for (auto& [r, x] : rows) {
    auto& c = s.configs[r].coordinates;
    c.insert(c.end(), x.begin(), x.end());
  }
  return s;
}

// Bin average of 1 -/+ (kappa(r)/kappa0)^2 with weight r^{d-1}.
double theory_bin(const Kernel& kernel, double lo, double hi) {
  const int d = kernel.dimension();
  const double sign = kernel.statistics() == Statistics::fermion ? -1.0 : 1.0;
  constexpr int kNodes = 64;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < kNodes; ++i) {
    const double r = lo + (hi - lo) * (i + 0.5) / kNodes;
    const double w = std::pow(r, d - 1);
    const double ratio = kernel.at_radius(r) / kernel.kappa0();
    num += w * (1.0 + sign * ratio * ratio);
    den += w;
  }
  return num / den;
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  const LoadedSample sample = load_sample(a.input, a.replicas);
  std::optional<MomentumDensity> density;
  if (a.density.given()) {
    density = a.density.build();
    validate_density(*density);
  }
  const auto d = static_cast<std::size_t>(density ? density->dimension() : std::max(sample.dimension, 1));
  if (sample.dimension != 0 && static_cast<std::size_t>(sample.dimension) != d) {
    throw UsageError("sample dimension does not match the density dimension");
  }
  const Window window(broadcast(parse_doubles(a.window, "--window"), d, "--window"));
  for (const auto& c : sample.configs) {
    for (std::size_t p = 0; p < c.size(); ++p) {
      if (!window.contains(c.point(p))) throw UsageError("sample contains a point outside --window");
    }
  }
  const auto edge = parse_edge_correction(a.edge);
  const double shortest_side = *std::min_element(window.extents().begin(), window.extents().end());
  const double r_max = a.r_max.value_or(edge == EdgeCorrection::periodic ? shortest_side / 2.0 : shortest_side / 4.0);
  if (a.r_bins < 1) throw UsageError("--r-bins must be >= 1");
  std::vector<double> edges;
  for (int i = 0; i <= a.r_bins; ++i) edges.push_back(r_max * i / a.r_bins);

  std::optional<Kernel> kernel;
  std::optional<double> reference;
  if (density) {
    kernel.emplace(*density);
    reference = kernel->kappa0();
  }

  EstimateReport report;
  report.replicas = sample.configs.size();
  report.intensity = estimate_intensity(
      sample.configs, window, to_ints(broadcast(parse_doubles(a.bins, "--bins"), d, "--bins"), "--bins"));
  report.pair = estimate_pair_correlation(sample.configs, window, edges, reference, edge);
  for (const auto& spec : a.functions) {
    const auto f = TestFunction::parse(spec);
    const auto v = empirical_characteristic(sample.configs, f);
    report.characteristic.push_back({f.describe(), v.value, v.error_estimate});
  }

  json bins = json::array();
  for (const auto& b : report.intensity.bins) {
    bins.push_back(json{{"lower", b.lower}, {"upper", b.upper}, {"value", b.value}, {"stderr", b.standard_error}});
  }
  json pair = json::array();
  for (const auto& b : report.pair.bins) {
    json e{{"lower", b.lower}, {"upper", b.upper}, {"pairs", b.pairs}, {"empty", b.empty}};
    e["value"] = b.empty ? json(nullptr) : json(b.value);
    e["stderr"] = b.empty ? json(nullptr) : json(b.standard_error);
    if (kernel) e["theory"] = theory_bin(*kernel, b.lower, b.upper);
    pair.push_back(e);
  }
  json chars = json::array();
  for (const auto& c : report.characteristic) {
    chars.push_back(json{{"f", c.label}, {"value", complex_json(c.value)}, {"stderr", c.standard_error}});
  }
  json intensity{{"mean", report.intensity.mean},
                 {"stderr", report.intensity.mean_stderr},
                 {"count_mean", report.intensity.count_mean},
                 {"count_variance", report.intensity.count_variance},
                 {"poisson_variance", report.intensity.count_mean},
                 {"bins", bins}};
  if (kernel) intensity["kappa0"] = kernel->kappa0();
  json config{{"input", a.input},
              {"window", window.extents()},
              {"replicas", report.replicas},
              {"r_max", r_max},
              {"r_bins", a.r_bins},
              {"edge_correction", std::string(to_string(edge))}};
  if (density) config["density"] = density_json(*density);
  json j{{"metadata", metadata(std::nullopt)},
         {"config", config},
         {"intensity", intensity},
         {"pair_correlation", json{{"reference_intensity", report.pair.reference_intensity}, {"bins", pair}}},
         {"characteristic", chars}};
  write_json(a.output, j, out);
  return kExitOk;
}

// --- functional -------------------------------------------------------------

struct FunctionalArgs {
  DensityArgs density;
  std::string window;
  std::string cells = "512";
  std::string method = "all";
  int n_max = 4;
  std::vector<std::string> functions;
  std::size_t replicas = 10000;
  std::uint64_t seed = 0;
  std::size_t qmc_nodes = 100000;
  unsigned threads = 0;
  std::string output;
};

json functional_json(const FunctionalValue& v) {
  json j{{"method", std::string(to_string(v.method))},
         {"value", complex_json(v.value)},
         {"abs", std::abs(v.value)},
         {"error_estimate", v.error_estimate}};
  if (v.method == FunctionalMethod::series) {
    j["n_max"] = v.n_max;
    j["tail_bound"] = std::isfinite(v.tail_bound) ? json(v.tail_bound) : json("inf");
    j["truncation_warning"] = v.truncation_warning;
    json terms = json::array();
    for (std::size_t n = 0; n < v.terms.size(); ++n) {
      terms.push_back(json{{"n", n}, {"value", complex_json(v.terms[n])}, {"error", v.term_errors[n]}});
    }
    j["terms"] = terms;
  }
  if (v.method == FunctionalMethod::empirical) j["replicas"] = v.replicas;
  return j;
}

int cmd_functional(const FunctionalArgs& a, std::ostream& out, std::ostream& err) {
  if (a.functions.empty()) throw UsageError("functional needs at least one --f <spec>");
  const bool all = a.method == "all";
  const bool series = all || a.method == "series";
  const bool fredholm = all || a.method == "fredholm";
  const bool empirical = all || a.method == "empirical";
  if (!series && !fredholm && !empirical) {
    throw UsageError("unknown --method '" + a.method + "' (expected series|fredholm|empirical|all)");
  }
  const MomentumDensity density = a.density.build();
  validate_density(density);
  const auto d = static_cast<std::size_t>(density.dimension());
  const Window window(broadcast(parse_doubles(a.window, "--window"), d, "--window"));
  const GridDiscretization grid(window, to_ints(broadcast(parse_doubles(a.cells, "--cells"), d, "--cells"), "--cells"));
  const Kernel kernel(density);
  const bool fermion = density.statistics() == Statistics::fermion;

  std::vector<TestFunction> fs;
  for (const auto& spec : a.functions) fs.push_back(TestFunction::parse(spec));

  std::optional<DiscretizedKernel> dk;
  if (fredholm || (empirical && fermion)) dk = discretize_kernel(kernel, grid);
  std::vector<Configuration> configs;
  if (empirical) {
    if (fermion) {
      configs = sample_replicas(a.replicas, [&](std::uint64_t r) { return sample_fermion(*dk, a.seed, r); }, a.threads);
    } else {
      const CoxSampler sampler(density, grid);
      configs = sample_replicas(a.replicas, [&](std::uint64_t r) { return sampler.sample(a.seed, r); }, a.threads);
    }
  }

  SeriesOptions options;
  options.qmc_nodes = a.qmc_nodes;
  options.seed = a.seed;
  bool failed = false;
  json results = json::array();
  for (const auto& f : fs) {
    json entry{{"f", f.describe()}};
    if (series) entry["series"] = functional_json(characteristic_series(kernel, f, grid, a.n_max, options));
    if (fredholm) {
      try {
        entry["fredholm"] = functional_json(fredholm_value(*dk, f));
      } catch (const DivergenceError& e) {
        entry["fredholm"] = json{{"method", "fredholm"}, {"error", e.what()}};
        err << "error: " << e.what() << "\n";
        failed = true;
      }
    }
    if (empirical) entry["empirical"] = functional_json(empirical_characteristic(configs, f));
    results.push_back(entry);
  }
  json config{{"density", density_json(density)},
              {"window", window.extents()},
              {"cells", grid.cells_per_axis()},
              {"method", a.method},
              {"n_max", a.n_max},
              {"replicas", a.replicas},
              {"qmc_nodes", a.qmc_nodes},
              {"seed", a.seed}};
  write_json(a.output, json{{"metadata", metadata(a.seed)}, {"config", config}, {"functions", results}}, out);
  return failed ? kExitValidation : kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"quasifree: determinantal and permanental point processes from quasi-free states"};
  app.name(args.empty() ? "quasifree" : args[0]);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  KernelArgs kernel_args;
  auto* kernel = app.add_subcommand("kernel", "evaluate kappa from a momentum density");
  kernel_args.density.attach(kernel);
  kernel->add_option("--at", kernel_args.at, "radius or comma-separated point; repeatable");
  kernel->add_option("--range", kernel_args.range, "r0,r1,count: CSV table of kappa(r)");
  kernel->add_option("--method", kernel_args.method, "auto | closed_form | quadrature");
  kernel->add_option("--digits", kernel_args.digits, "significant digits for --at");
  kernel->add_option("-o,--output", kernel_args.output, "output file (default stdout)");

  AlgebraArgs algebra_args;
  auto* algebra = app.add_subcommand("verify-algebra", "check CAR/CCR identities on the doubled Fock space");
  algebra->add_option("--m", algebra_args.m, "one-particle dimension");
  algebra->add_option("--seed", algebra_args.seed, "seed for the random K");
  algebra->add_option("--statistics", algebra_args.statistics, "fermion | boson");
  algebra->add_option("--order", algebra_args.order, "largest n checked (default 3 fermion, 2 boson)");
  algebra->add_option("--cutoff", algebra_args.cutoff, "boson occupation cutoff");
  algebra->add_option("--draws", algebra_args.draws, "number of random K draws");
  algebra->add_option("--max-eigenvalue", algebra_args.max_eigenvalue, "boson spectrum bound");
  algebra->add_option("--tolerance", algebra_args.tolerance, "override every tolerance");
  algebra->add_option("-o,--output", algebra_args.output, "JSON report (default stdout)");

  CorrelateArgs correlate_args;
  auto* correlate = app.add_subcommand("correlate", "evaluate k^(n) on point tuples from CSV");
  correlate_args.density.attach(correlate);
  correlate->add_option("--input", correlate_args.input, "CSV, one tuple of n*d coordinates per row")->required();
  correlate->add_option("-o,--output", correlate_args.output, "CSV with a value column (default stdout)");

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "draw replica configurations on a window");
  sample_args.density.attach(sample);
  sample->add_option("--window", sample_args.window, "side lengths, comma separated")->required();
  sample->add_option("--cells", sample_args.cells, "cells per axis");
  sample->add_option("--replicas", sample_args.replicas, "number of replicas");
  sample->add_option("--seed", sample_args.seed, "RNG seed")->required();
  sample->add_option("--threads", sample_args.threads, "worker threads (0: all cores)");
  sample->add_option("-o,--output", sample_args.output, "points CSV")->required();
  sample->add_option("--summary", sample_args.summary, "JSON summary (default stdout)");

  EstimateArgs estimate_args;
  auto* estimate = app.add_subcommand("estimate", "intensity, pair correlation and characteristic values from a sample CSV");
  estimate_args.density.attach(estimate);
  estimate->add_option("--input", estimate_args.input, "points CSV written by sample")->required();
  estimate->add_option("--window", estimate_args.window, "side lengths, comma separated")->required();
  estimate->add_option("--replicas", estimate_args.replicas, "replica count (default: from the CSV)");
  estimate->add_option("--bins", estimate_args.bins, "intensity bins per axis");
  estimate->add_option("--r-max", estimate_args.r_max, "largest pair distance");
  estimate->add_option("--r-bins", estimate_args.r_bins, "radial bins");
  estimate->add_option("--edge", estimate_args.edge, "translation | periodic");
  estimate->add_option("--f", estimate_args.functions, "test function spec; repeatable");
  estimate->add_option("-o,--output", estimate_args.output, "JSON report (default stdout)");

  FunctionalArgs functional_args;
  auto* functional = app.add_subcommand("functional", "characteristic functional by series, Fredholm form and sampling");
  functional_args.density.attach(functional);
  functional->add_option("--window", functional_args.window, "side lengths, comma separated")->required();
  functional->add_option("--cells", functional_args.cells, "cells per axis");
  functional->add_option("--method", functional_args.method, "series | fredholm | empirical | all");
  functional->add_option("--nmax", functional_args.n_max, "series truncation order");
  functional->add_option("--f", functional_args.functions, "test function spec; repeatable")->required();
  functional->add_option("--replicas", functional_args.replicas, "replicas for the empirical value");
  functional->add_option("--seed", functional_args.seed, "RNG seed");
  functional->add_option("--qmc-nodes", functional_args.qmc_nodes, "quasi-Monte-Carlo nodes per order");
  functional->add_option("--threads", functional_args.threads, "worker threads (0: all cores)");
  functional->add_option("-o,--output", functional_args.output, "JSON report (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (kernel->parsed()) return cmd_kernel(kernel_args, out);
    if (algebra->parsed()) return cmd_verify_algebra(algebra_args, out);
    if (correlate->parsed()) return cmd_correlate(correlate_args, out);
    if (sample->parsed()) return cmd_sample(sample_args, out);
    if (estimate->parsed()) return cmd_estimate(estimate_args, out);
    if (functional->parsed()) return cmd_functional(functional_args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "validation failure: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace quasifree::cli
