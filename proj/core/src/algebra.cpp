// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

#include "quasifree/algebra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "quasifree/error.hpp"
#include "quasifree/rng.hpp"

namespace quasifree {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kSpectrumTolerance = 1e-10;

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

// max |op(:, c)| over the selected columns
double max_on_columns(const ComplexMatrix& op, const std::vector<Eigen::Index>& columns) {
  double worst = 0.0;
  for (Eigen::Index c : columns) worst = std::max(worst, op.col(c).cwiseAbs().maxCoeff());
  return worst;
}

ComplexMatrix k_submatrix(const ComplexMatrix& k, std::span<const int> sites) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  ComplexMatrix sub(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) sub(a, b) = k(sites[a], sites[b]);
  }
  return sub;
}

Complex det_or_per(const ComplexMatrix& a, Statistics s) {
  return s == Statistics::fermion ? determinant(a) : permanent(a);
}

}  // namespace

// --- KMatrix ---------------------------------------------------------------

KMatrix::KMatrix(ComplexMatrix entries, Statistics statistics)
    : entries_(std::move(entries)), statistics_(statistics) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw ParameterError("K must be a non-empty square matrix");
  }
  const double scale = std::max(1.0, max_abs(entries_));
  if (hermiticity_defect(entries_) > kHermitianTolerance * scale) {
    throw ConstraintViolation("K is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(entries_, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo < -kSpectrumTolerance) {
    throw ConstraintViolation("K has eigenvalue " + std::to_string(lo) + " < 0 (requires 0 <= K)");
  }
  if (statistics_ == Statistics::fermion && hi > 1.0 + kSpectrumTolerance) {
    throw ConstraintViolation("K has eigenvalue " + std::to_string(hi) +
                              " > 1 (fermion requires 0 <= K <= 1)");
  }
}

KMatrix KMatrix::random(int m, Statistics statistics, std::uint64_t seed, double max_eigenvalue) {
  if (m < 1) throw ParameterError("K dimension must be positive");
  Philox4x32 rng(seed, 0x4b4d);
  std::normal_distribution<double> gauss;
  ComplexMatrix z(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) z(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  // fix column phases so q is Haar distributed
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  const double top = statistics == Statistics::fermion ? 1.0 : max_eigenvalue;
  RealVector lambda(m);
  for (int i = 0; i < m; ++i) lambda(i) = top * rng.uniform();
  ComplexMatrix k = q * lambda.cast<Complex>().asDiagonal() * q.adjoint();
  k = 0.5 * (k + k.adjoint()).eval();
  return KMatrix(std::move(k), statistics);
}

// --- Fock spaces -------------------------------------------------------------

FermionFockSpace::FermionFockSpace(int m) : m_(m) {
  if (m < 1 || m > 5) {
    throw SizeError("fermion Fock space supports 1 <= m <= 5 (dense 4^m basis), got m = " +
                    std::to_string(m));
  }
}

BosonFockSpace::BosonFockSpace(int m, int cutoff) : m_(m), cutoff_(cutoff) {
  if (m < 1) throw ParameterError("boson Fock space needs m >= 1");
  if (cutoff < 1) throw ParameterError("boson Fock space needs N_max >= 1");
  const int modes = 2 * m;
  for (int total = 0; total <= cutoff; ++total) {
    // occupation vectors of fixed total, lexicographically descending from (total, 0, ...)
    std::vector<int> occ(static_cast<std::size_t>(modes), 0);
    std::vector<std::vector<int>> level;
    auto fill = [&](auto&& self, int mode, int remaining) -> void {
      if (mode == modes - 1) {
        occ[static_cast<std::size_t>(mode)] = remaining;
        level.push_back(occ);
        return;
      }
      for (int n = remaining; n >= 0; --n) {
        occ[static_cast<std::size_t>(mode)] = n;
        self(self, mode + 1, remaining - n);
      }
    };
    fill(fill, 0, total);
    for (auto& s : level) {
      index_.emplace(s, static_cast<Eigen::Index>(states_.size()));
      states_.push_back(std::move(s));
    }
  }
  if (states_.size() > 20000) throw SizeError("boson Fock space too large for dense matrices");
}

int BosonFockSpace::total(Eigen::Index index) const {
  const auto& s = occupation(index);
  return std::accumulate(s.begin(), s.end(), 0);
}

Eigen::Index BosonFockSpace::index_of(const std::vector<int>& occupation) const {
  auto it = index_.find(occupation);
  return it == index_.end() ? Eigen::Index{-1} : it->second;
}

// --- mode operators ------------------------------------------------------------

ModeOperators build_car_operators(const FermionFockSpace& space) {
  const int modes = space.modes();
  const Eigen::Index dim = space.dimension();
  ModeOperators ops;
  for (int i = 0; i < modes; ++i) {
    ComplexMatrix create = ComplexMatrix::Zero(dim, dim);
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (Eigen::Index s = 0; s < dim; ++s) {
      const auto set = static_cast<std::uint64_t>(s);
      if (set & bit) continue;
      const int below = std::popcount(set & (bit - 1));
      create(static_cast<Eigen::Index>(set | bit), s) = (below % 2 == 0) ? 1.0 : -1.0;
    }
    ops.annihilators.push_back(create.adjoint());
    ops.creators.push_back(std::move(create));
  }
  return ops;
}

ModeOperators build_ccr_operators(const BosonFockSpace& space) {
  const int modes = space.modes();
  const Eigen::Index dim = space.dimension();
  ModeOperators ops;
  for (int i = 0; i < modes; ++i) {
    ComplexMatrix annihilate = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
      auto occ = space.occupation(s);
      const int n = occ[static_cast<std::size_t>(i)];
      if (n == 0) continue;
      occ[static_cast<std::size_t>(i)] = n - 1;
      annihilate(space.index_of(occ), s) = std::sqrt(static_cast<double>(n));
    }
    ops.creators.push_back(annihilate.adjoint());
    ops.annihilators.push_back(std::move(annihilate));
  }
  return ops;
}

// --- fields --------------------------------------------------------------------

std::size_t FieldSystem::idx(int site) const {
  if (site < 0 || site >= m_) throw ParameterError("site index out of range");
  return static_cast<std::size_t>(site);
}

ComplexMatrix FieldSystem::annihilator(const ComplexVector& f) const {
  if (f.size() != m_) throw ParameterError("test vector has wrong dimension");
  ComplexMatrix out = ComplexMatrix::Zero(dimension_, dimension_);
  for (int j = 0; j < m_; ++j) {
    if (f(j) != Complex(0.0)) out += std::conj(f(j)) * field_[static_cast<std::size_t>(j)];
  }
  return out;
}

ComplexMatrix FieldSystem::creator(const ComplexVector& f) const {
  if (f.size() != m_) throw ParameterError("test vector has wrong dimension");
  ComplexMatrix out = ComplexMatrix::Zero(dimension_, dimension_);
  for (int j = 0; j < m_; ++j) {
    if (f(j) != Complex(0.0)) out += f(j) * field_dagger_[static_cast<std::size_t>(j)];
  }
  return out;
}

ComplexVector FieldSystem::vacuum() const {
  ComplexVector v = ComplexVector::Zero(dimension_);
  v(0) = 1.0;
  return v;
}

std::vector<Eigen::Index> FieldSystem::safe_states(int reserve) const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index s = 0; s < dimension_; ++s) {
    if (statistics_ == Statistics::fermion || occupations_[static_cast<std::size_t>(s)] + reserve <= cutoff_) {
      out.push_back(s);
    }
  }
  return out;
}

int FieldSystem::occupation_of(Eigen::Index index) const {
  return occupations_[static_cast<std::size_t>(index)];
}

namespace {

// psi(e_j) = sum_i conj(K2_ij) a_{2,i} + sum_i conj(K1_ij) a^*_{1,i}
void build_site_fields(const ModeOperators& modes, const ComplexMatrix& k1, const ComplexMatrix& k2,
                       int m, Eigen::Index dim, std::vector<ComplexMatrix>& field,
                       std::vector<ComplexMatrix>& dagger) {
  field.clear();
  dagger.clear();
  for (int j = 0; j < m; ++j) {
    ComplexMatrix psi = ComplexMatrix::Zero(dim, dim);
    for (int i = 0; i < m; ++i) {
      const auto second = static_cast<std::size_t>(m + i);
      const auto first = static_cast<std::size_t>(i);
      if (k2(i, j) != Complex(0.0)) psi += std::conj(k2(i, j)) * modes.annihilators[second];
      if (k1(i, j) != Complex(0.0)) psi += std::conj(k1(i, j)) * modes.creators[first];
    }
    dagger.push_back(psi.adjoint());
    field.push_back(std::move(psi));
  }
}

}  // namespace

FieldSystem build_fermion_fields(const KMatrix& k, const FermionFockSpace& space) {
  if (k.dimension() != space.one_particle_dimension()) {
    throw ParameterError("K dimension does not match the Fock space");
  }
  FieldSystem fs(KMatrix(k.matrix(), Statistics::fermion));
  fs.statistics_ = Statistics::fermion;
  fs.m_ = k.dimension();
  fs.dimension_ = space.dimension();
  fs.k1_ = hermitian_function(k.matrix(), [](double x) { return std::sqrt(x); }, 0.0, 1.0,
                              kSpectrumTolerance);
  fs.k2_ = hermitian_function(k.matrix(), [](double x) { return std::sqrt(1.0 - x); }, 0.0, 1.0,
                              kSpectrumTolerance);
  fs.modes_ = build_car_operators(space);
  build_site_fields(fs.modes_, fs.k1_, fs.k2_, fs.m_, fs.dimension_, fs.field_, fs.field_dagger_);
  fs.occupations_.resize(static_cast<std::size_t>(fs.dimension_));
  for (Eigen::Index s = 0; s < fs.dimension_; ++s) {
    fs.occupations_[static_cast<std::size_t>(s)] = std::popcount(static_cast<std::uint64_t>(s));
  }
  return fs;
}

FieldSystem build_boson_fields(const KMatrix& k, const BosonFockSpace& space) {
  if (k.dimension() != space.one_particle_dimension()) {
    throw ParameterError("K dimension does not match the Fock space");
  }
  FieldSystem fs(KMatrix(k.matrix(), Statistics::boson));
  fs.statistics_ = Statistics::boson;
  fs.m_ = k.dimension();
  fs.cutoff_ = space.cutoff();
  fs.dimension_ = space.dimension();
  constexpr double inf = std::numeric_limits<double>::infinity();
  fs.k1_ = hermitian_function(k.matrix(), [](double x) { return std::sqrt(x); }, 0.0, inf,
                              kSpectrumTolerance);
  fs.k2_ = hermitian_function(k.matrix(), [](double x) { return std::sqrt(1.0 + x); }, 0.0, inf,
                              kSpectrumTolerance);
  fs.modes_ = build_ccr_operators(space);
  build_site_fields(fs.modes_, fs.k1_, fs.k2_, fs.m_, fs.dimension_, fs.field_, fs.field_dagger_);
  fs.occupations_.resize(static_cast<std::size_t>(fs.dimension_));
  for (Eigen::Index s = 0; s < fs.dimension_; ++s) {
    fs.occupations_[static_cast<std::size_t>(s)] = space.total(s);
  }
  return fs;
}

// --- checks --------------------------------------------------------------------

Comparison n_point_check(const FieldSystem& fields, std::span<const ComplexVector> f,
                         std::span<const ComplexVector> g) {
  if (fields.statistics() == Statistics::boson &&
      static_cast<int>(f.size() + g.size()) > 2 * fields.cutoff()) {
    throw SizeError("n + m exceeds what the boson cutoff represents exactly");
  }
  ComplexVector state = fields.vacuum();
  for (auto it = g.rbegin(); it != g.rend(); ++it) state = fields.annihilator(*it) * state;
  for (const auto& fi : f) state = fields.creator(fi) * state;

  Comparison out;
  out.measured = state(0);
  if (f.size() != g.size()) {
    out.formula = 0.0;
  } else {
    const auto n = static_cast<Eigen::Index>(f.size());
    ComplexMatrix gram(n, n);
    const ComplexMatrix& k = fields.k().matrix();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        // (f_i, K g_j) = sum_k f_i,k conj((K g_j)_k)
        gram(i, j) = (k * g[static_cast<std::size_t>(j)]).dot(f[static_cast<std::size_t>(i)]);
      }
    }
    out.formula = det_or_per(gram, fields.statistics());
  }
  out.deviation = std::abs(out.measured - out.formula);
  return out;
}

OperatorMatrix site_density(const FieldSystem& fields, int site) {
  return {fields.creator(site) * fields.annihilator(site), "rho_" + std::to_string(site)};
}

OperatorMatrix density_operator(const FieldSystem& fields, std::span<const double> f) {
  if (static_cast<int>(f.size()) != fields.one_particle_dimension()) {
    throw ParameterError("site weights have wrong dimension");
  }
  ComplexMatrix rho = ComplexMatrix::Zero(fields.dimension(), fields.dimension());
  for (int i = 0; i < fields.one_particle_dimension(); ++i) {
    const double w = f[static_cast<std::size_t>(i)];
    if (w != 0.0) rho += w * (fields.creator(i) * fields.annihilator(i));
  }
  return {std::move(rho), "rho(f)"};
}

double commutativity_check(const FieldSystem& fields, const OperatorMatrix& rho1,
                           const OperatorMatrix& rho2) {
  const ComplexMatrix comm = rho1.matrix * rho2.matrix - rho2.matrix * rho1.matrix;
  if (fields.statistics() == Statistics::fermion) return max_abs(comm);
  return max_on_columns(comm, fields.safe_states(4));
}

OperatorMatrix normal_product(const FieldSystem& fields, std::span<const int> sites) {
  if (sites.empty()) throw ParameterError("normal product needs at least one site");
  std::map<std::vector<int>, ComplexMatrix> memo;
  auto recurse = [&](auto&& self, std::vector<int> key) -> ComplexMatrix {
    std::sort(key.begin(), key.end());
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    ComplexMatrix out;
    if (key.size() == 1) {
      out = site_density(fields, key.front()).matrix;
    } else {
      // symmetrize over which label plays x_{n+1}
      out = ComplexMatrix::Zero(fields.dimension(), fields.dimension());
      const std::size_t n1 = key.size();
      for (std::size_t last = 0; last < n1; ++last) {
        std::vector<int> rest;
        rest.reserve(n1 - 1);
        for (std::size_t j = 0; j < n1; ++j) {
          if (j != last) rest.push_back(key[j]);
        }
        const auto coincidences =
            static_cast<double>(std::count(rest.begin(), rest.end(), key[last]));
        const ComplexMatrix inner = self(self, rest);
        out += site_density(fields, key[last]).matrix * inner - coincidences * inner;
      }
      out /= static_cast<double>(n1);
    }
    memo.emplace(key, out);
    return out;
  };
  std::string label = ":";
  for (int s : sites) label += "rho_" + std::to_string(s) + " ";
  label.back() = ':';
  return {recurse(recurse, std::vector<int>(sites.begin(), sites.end())), label};
}

OperatorMatrix creation_first_product(const FieldSystem& fields, std::span<const int> sites) {
  if (sites.empty()) throw ParameterError("product needs at least one site");
  std::vector<int> order(sites.begin(), sites.end());
  std::sort(order.begin(), order.end());
  ComplexMatrix sum = ComplexMatrix::Zero(fields.dimension(), fields.dimension());
  int count = 0;
  do {
    // psi^*(x_n) ... psi^*(x_1) psi(x_1) ... psi(x_n)
    ComplexMatrix term = identity(fields.dimension());
    for (auto it = order.rbegin(); it != order.rend(); ++it) term = term * fields.creator(*it);
    for (int s : order) term = term * fields.annihilator(s);
    sum += term;
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  // next_permutation enumerates distinct arrangements of the multiset, which is the
  // symmetrization up to a uniform multiplicity
  return {sum / static_cast<double>(count), "psi*...psi"};
}

double wick_identity_check(const FieldSystem& fields, std::span<const int> sites) {
  const ComplexMatrix diff =
      normal_product(fields, sites).matrix - creation_first_product(fields, sites).matrix;
  if (fields.statistics() == Statistics::fermion) return max_abs(diff);
  return max_on_columns(diff, fields.safe_states(2 * static_cast<int>(sites.size())));
}

Comparison factorial_moment(const FieldSystem& fields, std::span<const int> sites) {
  Comparison out;
  out.measured = normal_product(fields, sites).matrix(0, 0);
  out.formula = det_or_per(k_submatrix(fields.k().matrix(), sites), fields.statistics());
  out.deviation = std::abs(out.measured - out.formula);
  return out;
}

Complex raw_vacuum_moment(const FieldSystem& fields, std::span<const int> sites) {
  ComplexVector state = fields.vacuum();
  for (auto it = sites.rbegin(); it != sites.rend(); ++it) {
    state = fields.creator(*it) * (fields.annihilator(*it) * state);
  }
  return state(0);
}

std::vector<std::vector<std::vector<int>>> set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  if (n <= 0) return out;
  std::vector<std::vector<int>> blocks;
  auto place = [&](auto&& self, int item) -> void {
    if (item == n) {
      out.push_back(blocks);
      return;
    }
    // index loop: the recursion appends to `blocks` and may reallocate it
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b].push_back(item);
      self(self, item + 1);
      blocks[b].pop_back();
    }
    blocks.push_back({item});
    self(self, item + 1);
    blocks.pop_back();
  };
  place(place, 0);
  return out;
}

Complex raw_moment_from_factorial(const FieldSystem& fields, std::span<const int> sites) {
  Complex total = 0.0;
  for (const auto& partition : set_partitions(static_cast<int>(sites.size()))) {
    std::vector<int> representatives;
    bool consistent = true;
    for (const auto& block : partition) {
      const int site = sites[static_cast<std::size_t>(block.front())];
      for (int pos : block) consistent = consistent && sites[static_cast<std::size_t>(pos)] == site;
      representatives.push_back(site);
    }
    if (!consistent) continue;
    total += det_or_per(k_submatrix(fields.k().matrix(), representatives), fields.statistics());
  }
  return total;
}

double mode_relation_residual(const ModeOperators& ops, Statistics statistics,
                              const std::vector<Eigen::Index>& columns) {
  const auto modes = ops.annihilators.size();
  if (modes == 0) return 0.0;
  const Eigen::Index dim = ops.annihilators.front().rows();
  const double sign = statistics == Statistics::fermion ? 1.0 : -1.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < modes; ++i) {
    for (std::size_t j = 0; j < modes; ++j) {
      const auto& ai = ops.annihilators[i];
      const auto& aj = ops.annihilators[j];
      const auto& cj = ops.creators[j];
      ComplexMatrix mixed = ai * cj + sign * (cj * ai);
      if (i == j) mixed -= identity(dim);
      const ComplexMatrix same = ai * aj + sign * (aj * ai);
      worst = std::max({worst, max_on_columns(mixed, columns), max_on_columns(same, columns)});
    }
  }
  return worst;
}

double field_relation_residual(const FieldSystem& fields) {
  const int m = fields.one_particle_dimension();
  const double sign = fields.statistics() == Statistics::fermion ? 1.0 : -1.0;
  const auto columns = fields.safe_states(2);
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const auto& pi = fields.annihilator(i);
      const auto& pj = fields.annihilator(j);
      const auto& cj = fields.creator(j);
      ComplexMatrix mixed = pi * cj + sign * (cj * pi);
      if (i == j) mixed -= identity(fields.dimension());
      const ComplexMatrix same = pi * pj + sign * (pj * pi);
      worst = std::max({worst, max_on_columns(mixed, columns), max_on_columns(same, columns)});
    }
  }
  return worst;
}

int density_cyclic_dimension(const FieldSystem& fields, int max_order) {
  const int m = fields.one_particle_dimension();
  std::vector<ComplexVector> vectors{fields.vacuum()};
  std::vector<ComplexVector> frontier{fields.vacuum()};
  std::vector<std::vector<int>> frontier_sites{{}};
  for (int order = 1; order <= max_order; ++order) {
    std::vector<ComplexVector> next;
    std::vector<std::vector<int>> next_sites;
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      const int start = frontier_sites[k].empty() ? 0 : frontier_sites[k].back();
      for (int s = start; s < m; ++s) {
        next.push_back(site_density(fields, s).matrix * frontier[k]);
        auto sites = frontier_sites[k];
        sites.push_back(s);
        next_sites.push_back(std::move(sites));
      }
    }
    vectors.insert(vectors.end(), next.begin(), next.end());
    frontier = std::move(next);
    frontier_sites = std::move(next_sites);
  }
  ComplexMatrix span(fields.dimension(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t c = 0; c < vectors.size(); ++c) span.col(static_cast<Eigen::Index>(c)) = vectors[c];
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(span);
  qr.setThreshold(1e-10);
  return static_cast<int>(qr.rank());
}

}  // namespace quasifree
