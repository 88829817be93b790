// Copyright 2026 The quasifree Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file algebra.hpp
 * @brief Finite-dimensional doubled-Fock realization of quasi-free CAR/CCR states.
 *
 * One-particle space H = C^m. The Fock space is built over H (+) H with 2m modes:
 * modes 0..m-1 belong to the first summand, modes m..2m-1 to the second. Given an m x m
 * Hermitian K the field operators are
 *
 *     fermion:  psi(f) = a_2(K_2 f) + a_1^*(J K_1 f),   K_1 = K^{1/2}, K_2 = (1 - K)^{1/2}
 *     boson:    phi(f) = b_2(K_2 f) + b_1^*(J K_1 f),   K_1 = K^{1/2}, K_2 = (1 + K)^{1/2}
 *
 * with J entrywise conjugation, a(f) = sum_i conj(f_i) a_i (antilinear) and
 * a^*(f) = sum_i f_i a_i^*. The one-particle inner product is (f, g) = sum_i f_i conj(g_i),
 * for which <Omega, psi^*(f) psi(g) Omega> = (f, K g).
 *
 * The boson Fock space is truncated at a total occupation N_max. Creation operators are the
 * exact adjoints of the truncated annihilators, so CCR hold on every state whose occupation
 * leaves room for the quanta a given operator string can add; the *_safe helpers restrict
 * comparisons to those states.
 */

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "quasifree/kernels.hpp"
#include "quasifree/linalg.hpp"

namespace quasifree {

/// Fock-space operator with a human-readable label.
struct OperatorMatrix {
  ComplexMatrix matrix;
  std::string label;
};

/// m x m Hermitian two-point operator. Fermion: spectrum in [0, 1]; boson: spectrum >= 0.
class KMatrix {
 public:
  /// Throws ConstraintViolation if not Hermitian to 1e-12 or the spectrum leaves its
  /// admissible interval by more than 1e-10.
  KMatrix(ComplexMatrix entries, Statistics statistics);

  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return entries_; }
  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(entries_.rows()); }
  [[nodiscard]] Statistics statistics() const noexcept { return statistics_; }

  /// Haar-random eigenbasis with eigenvalues uniform in [0, 1] (fermion) or [0, max_eigenvalue]
  /// (boson).
  static KMatrix random(int m, Statistics statistics, std::uint64_t seed,
                        double max_eigenvalue = 1.0);

 private:
  ComplexMatrix entries_;
  Statistics statistics_;
};

class FermionFockSpace {
 public:
  explicit FermionFockSpace(int m);

  [[nodiscard]] int one_particle_dimension() const noexcept { return m_; }
  [[nodiscard]] int modes() const noexcept { return 2 * m_; }
  /// 4^m subsets of the 2m modes; basis index = occupation bitmask, vacuum = 0.
  [[nodiscard]] Eigen::Index dimension() const noexcept { return Eigen::Index{1} << (2 * m_); }

 private:
  int m_;
};

class BosonFockSpace {
 public:
  BosonFockSpace(int m, int cutoff);

  [[nodiscard]] int one_particle_dimension() const noexcept { return m_; }
  [[nodiscard]] int modes() const noexcept { return 2 * m_; }
  [[nodiscard]] int cutoff() const noexcept { return cutoff_; }
  [[nodiscard]] Eigen::Index dimension() const noexcept {
    return static_cast<Eigen::Index>(states_.size());
  }
  /// Occupation vectors ordered by total occupation, then lexicographically; vacuum first.
  [[nodiscard]] const std::vector<int>& occupation(Eigen::Index index) const {
    return states_[static_cast<std::size_t>(index)];
  }
  [[nodiscard]] int total(Eigen::Index index) const;
  /// Index of an occupation vector, or -1 if it exceeds the cutoff.
  [[nodiscard]] Eigen::Index index_of(const std::vector<int>& occupation) const;

 private:
  int m_;
  int cutoff_;
  std::vector<std::vector<int>> states_;
  std::map<std::vector<int>, Eigen::Index> index_;
};

/// Annihilators and creators for each of the 2m modes, creators[k] = annihilators[k]^dagger.
struct ModeOperators {
  std::vector<ComplexMatrix> annihilators;
  std::vector<ComplexMatrix> creators;
};

/// Subset basis with the Jordan-Wigner sign (-1)^{#{k in S : k < i}}.
[[nodiscard]] ModeOperators build_car_operators(const FermionFockSpace& space);

/// Occupation basis with sqrt(n) factors, truncated at the cutoff.
[[nodiscard]] ModeOperators build_ccr_operators(const BosonFockSpace& space);

/// Field operators of a quasi-free state on the doubled Fock space.
class FieldSystem {
 public:
  [[nodiscard]] Statistics statistics() const noexcept { return statistics_; }
  [[nodiscard]] int one_particle_dimension() const noexcept { return m_; }
  [[nodiscard]] Eigen::Index dimension() const noexcept { return dimension_; }
  [[nodiscard]] const KMatrix& k() const noexcept { return k_; }
  [[nodiscard]] const ComplexMatrix& k1() const noexcept { return k1_; }
  [[nodiscard]] const ComplexMatrix& k2() const noexcept { return k2_; }
  /// Boson cutoff N_max; 0 for fermions.
  [[nodiscard]] int cutoff() const noexcept { return cutoff_; }

  /// psi(e_j) / phi(e_j) and their adjoints.
  [[nodiscard]] const ComplexMatrix& annihilator(int site) const { return field_[idx(site)]; }
  [[nodiscard]] const ComplexMatrix& creator(int site) const { return field_dagger_[idx(site)]; }

  /// psi(f) = sum_j conj(f_j) psi(e_j) (antilinear in f).
  [[nodiscard]] ComplexMatrix annihilator(const ComplexVector& f) const;
  /// psi^*(f) = psi(f)^dagger (linear in f).
  [[nodiscard]] ComplexMatrix creator(const ComplexVector& f) const;

  [[nodiscard]] ComplexVector vacuum() const;
  [[nodiscard]] const ModeOperators& modes() const noexcept { return modes_; }

  /// Basis indices whose total occupation is <= cutoff - reserve (all states for fermions).
  [[nodiscard]] std::vector<Eigen::Index> safe_states(int reserve) const;

  /// Total occupation of a basis state.
  [[nodiscard]] int occupation_of(Eigen::Index index) const;

 private:
  friend FieldSystem build_fermion_fields(const KMatrix&, const FermionFockSpace&);
  friend FieldSystem build_boson_fields(const KMatrix&, const BosonFockSpace&);
  FieldSystem(const KMatrix& k) : k_(k) {}
  std::size_t idx(int site) const;

  KMatrix k_;
  Statistics statistics_ = Statistics::fermion;
  int m_ = 0;
  int cutoff_ = 0;
  Eigen::Index dimension_ = 0;
  ComplexMatrix k1_, k2_;
  ModeOperators modes_;
  std::vector<ComplexMatrix> field_;
  std::vector<ComplexMatrix> field_dagger_;
  std::vector<int> occupations_;
};

/// Throws ConstraintViolation if K is not fermion-valid.
[[nodiscard]] FieldSystem build_fermion_fields(const KMatrix& k, const FermionFockSpace& space);
/// Throws ConstraintViolation if K is not boson-valid.
[[nodiscard]] FieldSystem build_boson_fields(const KMatrix& k, const BosonFockSpace& space);

/// Default boson cutoff for vacuum quantities of the given total order.
[[nodiscard]] constexpr int default_boson_cutoff(int moment_order) noexcept { return moment_order + 2; }

struct Comparison {
  Complex measured;
  Complex formula;
  double deviation = 0.0;
};

/// <Omega, psi^*(f_n)...psi^*(f_1) psi(g_1)...psi(g_m) Omega> against
/// delta_{nm} det((f_i, K g_j)) (fermion) or delta_{nm} per((f_i, K g_j)) (boson).
[[nodiscard]] Comparison n_point_check(const FieldSystem& fields, std::span<const ComplexVector> f,
                                       std::span<const ComplexVector> g);

/// rho(f) = sum_i f(i) psi^*(e_i) psi(e_i).
[[nodiscard]] OperatorMatrix density_operator(const FieldSystem& fields, std::span<const double> f);
/// rho_i = psi^*(e_i) psi(e_i).
[[nodiscard]] OperatorMatrix site_density(const FieldSystem& fields, int site);

/// max |[rho_1, rho_2]| over the columns of states where both products are exact.
[[nodiscard]] double commutativity_check(const FieldSystem& fields, const OperatorMatrix& rho1,
                                         const OperatorMatrix& rho2);

/// :rho_{i_1}...rho_{i_n}: from the recursion
///   :rho(x_{n+1}) ... rho(x_1): = Sym[ rho(x_{n+1}) :rho(x_1)...rho(x_n):
///                                     - sum_i delta(x_{n+1}, x_i) :rho(x_1)...rho(x_n): ].
[[nodiscard]] OperatorMatrix normal_product(const FieldSystem& fields, std::span<const int> sites);

/// psi^*_{i_n}...psi^*_{i_1} psi_{i_1}...psi_{i_n}, symmetrized over the site tuple.
[[nodiscard]] OperatorMatrix creation_first_product(const FieldSystem& fields,
                                                    std::span<const int> sites);

/// || normal_product - creation_first_product ||_max (boson: on states with room for 2n quanta).
[[nodiscard]] double wick_identity_check(const FieldSystem& fields, std::span<const int> sites);

/// <Omega, :rho_{i_1}...rho_{i_n}: Omega> against det / per of K restricted to the sites.
[[nodiscard]] Comparison factorial_moment(const FieldSystem& fields, std::span<const int> sites);

/// <Omega, rho_{i_1}...rho_{i_n} Omega> by matrix products.
[[nodiscard]] Complex raw_vacuum_moment(const FieldSystem& fields, std::span<const int> sites);

/// Raw moment rebuilt from factorial moments by unrolling the configuration recursion:
/// sum over set partitions of the positions whose blocks carry equal sites.
[[nodiscard]] Complex raw_moment_from_factorial(const FieldSystem& fields, std::span<const int> sites);

/// Sum over set partitions of {0..n-1}; each partition is a list of blocks.
[[nodiscard]] std::vector<std::vector<std::vector<int>>> set_partitions(int n);

/// max over basis pairs of the CAR (fermion) or CCR (boson, safe subspace) residuals for the
/// field operators psi(e_i), psi^*(e_j).
[[nodiscard]] double field_relation_residual(const FieldSystem& fields);

/// Residual of the plain mode relations a_i, a_j^* on the Fock space itself.
[[nodiscard]] double mode_relation_residual(const ModeOperators& ops, Statistics statistics,
                                            const std::vector<Eigen::Index>& columns);

/// Dimension of span{Omega, rho_{i_1}...rho_{i_k} Omega : k <= max_order} (rank at 1e-10).
[[nodiscard]] int density_cyclic_dimension(const FieldSystem& fields, int max_order);

}  // namespace quasifree
