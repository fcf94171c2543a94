#pragma once

// Determinant-space Hamiltonian: Slater-Condon matrix elements, sparse
// assembly, the Fock build at the reference and the splitting H = F + W.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <bit>
#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcc/determinant.hpp"
#include "tcc/error.hpp"
#include "tcc/fock.hpp"
#include "tcc/integrals.hpp"

namespace tcc {

using SparseMatrix = Eigen::SparseMatrix<double>;

inline constexpr double kNonCanonicalTolerance = 1e-8;

/// Ordered determinant list with O(1) lookup by occupation string.
class DeterminantSpace {
 public:
  DeterminantSpace() = default;
  explicit DeterminantSpace(const OrbitalBasis& basis, std::optional<BasisSplit> restrict_to = std::nullopt)
      : basis_(basis), dets_(enumerate_determinants(basis, restrict_to)) {
    lookup_.reserve(dets_.size());
    for (std::size_t i = 0; i < dets_.size(); ++i) lookup_.emplace(dets_[i].bits(), i);
  }

  const OrbitalBasis& basis() const { return basis_; }
  std::size_t size() const { return dets_.size(); }
  const Determinant& operator[](std::size_t i) const { return dets_[i]; }
  const std::vector<Determinant>& determinants() const { return dets_; }

  std::optional<std::size_t> find(Bits occ) const {
    auto it = lookup_.find(occ);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t reference_index() const { return *find(basis_.reference_bits()); }

  Eigen::VectorXd unit(std::size_t i) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
    v[static_cast<Eigen::Index>(i)] = 1.0;
    return v;
  }
  Eigen::VectorXd reference_vector() const { return unit(reference_index()); }

 private:
  OrbitalBasis basis_;
  std::vector<Determinant> dets_;
  std::unordered_map<Bits, std::size_t> lookup_;
};

/// <bra|H|ket> by the Slater-Condon rules, e_core included on the diagonal.
inline double matrix_element(Determinant bra, Determinant ket, const IntegralSet& ints) {
  if (bra.count() != ket.count()) return 0.0;
  const Bits holes = ket.bits() & ~bra.bits();
  const Bits parts = bra.bits() & ~ket.bits();
  const int n = std::popcount(holes);
  if (n > 2) return 0.0;
  const auto occ = ket.orbitals();

  if (n == 0) {
    double e = ints.e_core;
    for (std::size_t x = 0; x < occ.size(); ++x) {
      e += ints.h_so(occ[x], occ[x]);
      for (std::size_t y = 0; y < x; ++y) e += ints.g_anti(occ[x], occ[y], occ[x], occ[y]);
    }
    return e;
  }

  if (n == 1) {
    const int i = std::countr_zero(holes);
    const int a = std::countr_zero(parts);
    Bits b = ket.bits();
    int sign = 1;
    annihilate(b, i, sign);
    create(b, a, sign);
    double v = ints.h_so(a, i);
    for (int j : occ)
      if (j != i) v += ints.g_anti(a, j, i, j);
    return sign * v;
  }

  const int i = std::countr_zero(holes);
  const int j = 63 - std::countl_zero(holes);
  const int a = std::countr_zero(parts);
  const int b = 63 - std::countl_zero(parts);
  // a+_a a+_b a_j a_i |ket>
  Bits occ_bits = ket.bits();
  int sign = 1;
  annihilate(occ_bits, i, sign);
  annihilate(occ_bits, j, sign);
  create(occ_bits, b, sign);
  create(occ_bits, a, sign);
  return sign * ints.g_anti(a, b, i, j);
}

namespace detail {

/// Calls visit(target_bits) for the ket itself and every determinant reachable
/// by a single or double replacement inside spin-orbitals 0..upto-1.
template <class Visit>
void for_each_connected(Bits ket, int upto, Visit&& visit) {
  visit(ket);
  const auto occ = bits_to_orbitals(ket);
  std::vector<int> virt;
  for (int p = 0; p < upto; ++p)
    if (!(ket & bit(p))) virt.push_back(p);
  for (int i : occ)
    for (int a : virt) visit((ket & ~bit(i)) | bit(a));
  for (std::size_t x = 0; x < occ.size(); ++x)
    for (std::size_t y = x + 1; y < occ.size(); ++y)
      for (std::size_t u = 0; u < virt.size(); ++u)
        for (std::size_t w = u + 1; w < virt.size(); ++w)
          visit((ket & ~bit(occ[x]) & ~bit(occ[y])) | bit(virt[u]) | bit(virt[w]));
}

inline int space_extent(const DeterminantSpace& space) {
  Bits all = 0;
  for (const auto& d : space.determinants()) all |= d.bits();
  return all ? 64 - std::countl_zero(all) : 0;
}

}  // namespace detail

/// Sparse symmetric H over `space`.
inline SparseMatrix hamiltonian_matrix(const DeterminantSpace& space, const IntegralSet& ints) {
  if (space.basis().n_orbitals != ints.n_spin_orbitals())
    fail(ErrorKind::DimensionMismatch, "basis and integrals disagree on K");
  const int upto = space.basis().n_orbitals;
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t col = 0; col < space.size(); ++col) {
    const Determinant ket = space[col];
    detail::for_each_connected(ket.bits(), upto, [&](Bits target) {
      auto row = space.find(target);
      if (!row) return;
      const double v = matrix_element(Determinant(target), ket, ints);
      if (v != 0.0) trip.emplace_back(static_cast<int>(*row), static_cast<int>(col), v);
    });
  }
  const auto n = static_cast<Eigen::Index>(space.size());
  SparseMatrix h(n, n);
  h.setFromTriplets(trip.begin(), trip.end());
  h.makeCompressed();
  return h;
}

inline Eigen::VectorXd apply_hamiltonian(const SparseMatrix& h, const Eigen::VectorXd& v) {
  if (v.size() != h.cols())
    fail(ErrorKind::DimensionMismatch, "vector length " + std::to_string(v.size()) + " vs space dimension " +
                                           std::to_string(h.cols()));
  return h * v;
}

/// Spin-orbital Fock matrix f_pq = h_pq + sum_i <pi||qi> at the reference.
inline FockSpectrum fock_matrix(const IntegralSet& ints, const OrbitalBasis& basis) {
  const int K = basis.n_orbitals;
  if (K != ints.n_spin_orbitals()) fail(ErrorKind::DimensionMismatch, "basis and integrals disagree on K");
  Eigen::MatrixXd f(K, K);
  for (int p = 0; p < K; ++p)
    for (int q = 0; q < K; ++q) {
      double v = ints.h_so(p, q);
      for (int i = 0; i < basis.n_electrons; ++i) v += ints.g_anti(p, i, q, i);
      f(p, q) = v;
    }
  FockSpectrum out = FockSpectrum::from_diagonal(f.diagonal(), basis.n_electrons);
  out.matrix = f;
  Eigen::MatrixXd off = f;
  off.diagonal().setZero();
  out.off_diag_norm = off.norm();
  if (out.off_diag_norm > kNonCanonicalTolerance) out.warnings.push_back("NonCanonicalOrbitals");
  return out;
}

/// Diagonal of F_diag on the determinant space: sum of lambda over occupied orbitals.
inline Eigen::VectorXd fock_diagonal(const DeterminantSpace& space, const FockSpectrum& fock) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i) d[static_cast<Eigen::Index>(i)] = fock.orbital_sum(space[i].bits());
  return d;
}

/// W v = H v - F_diag v. Off-diagonal Fock couplings and e_core stay in W.
inline Eigen::VectorXd fluctuation_apply(const SparseMatrix& h, const Eigen::VectorXd& fdiag, const Eigen::VectorXd& v) {
  if (fdiag.size() != h.cols()) fail(ErrorKind::DimensionMismatch, "Fock diagonal length");
  return apply_hamiltonian(h, v) - fdiag.cwiseProduct(v);
}

inline SparseMatrix fluctuation_matrix(const SparseMatrix& h, const Eigen::VectorXd& fdiag) {
  SparseMatrix w = h;
  for (Eigen::Index i = 0; i < w.rows(); ++i) w.coeffRef(i, i) -= fdiag[i];
  w.prune(0.0);
  return w;
}

/// Explicit one-body operator sum_pq f_pq a+_p a_q on the determinant space.
inline SparseMatrix one_body_operator(const DeterminantSpace& space, const Eigen::MatrixXd& f) {
  std::vector<Eigen::Triplet<double>> trip;
  const int K = space.basis().n_orbitals;
  for (std::size_t col = 0; col < space.size(); ++col) {
    const Bits ket = space[col].bits();
    double diag = 0.0;
    for (int p : bits_to_orbitals(ket)) diag += f(p, p);
    trip.emplace_back(static_cast<int>(col), static_cast<int>(col), diag);
    for (int q : bits_to_orbitals(ket))
      for (int p = 0; p < K; ++p) {
        if (ket & bit(p) || f(p, q) == 0.0) continue;
        Bits b = ket;
        int sign = 1;
        annihilate(b, q, sign);
        create(b, p, sign);
        if (auto row = space.find(b)) trip.emplace_back(static_cast<int>(*row), static_cast<int>(col), sign * f(p, q));
      }
  }
  const auto n = static_cast<Eigen::Index>(space.size());
  SparseMatrix out(n, n);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace tcc
