#pragma once

// Cluster operators as sparse matrices on a determinant space and their
// exponentials. All series terminate: every excitation raises the rank, so
// T^m vanishes once m exceeds min(N, K - N).

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <utility>
#include <vector>

#include "tcc/amplitudes.hpp"
#include "tcc/determinant.hpp"
#include "tcc/hamiltonian.hpp"

namespace tcc {

namespace detail {

struct PreparedExcitation {
  Bits holes = 0;
  Bits parts = 0;
  std::vector<int> hole_list;
  std::vector<int> part_list;
  double value = 0.0;
};

/// Same phase rule as apply_excitation, without allocating per call.
inline bool apply_prepared(const PreparedExcitation& x, Bits& occ, int& sign) {
  if ((occ & x.holes) != x.holes || (occ & x.parts) != 0) return false;
  for (std::size_t l = x.hole_list.size(); l-- > 0;) {
    annihilate(occ, x.hole_list[l], sign);
    create(occ, x.part_list[l], sign);
  }
  return true;
}

}  // namespace detail

/// Matrix of sum_mu t_mu X_mu restricted to `space` (targets outside it are dropped).
inline SparseMatrix cluster_matrix(const DeterminantSpace& space, const std::vector<std::pair<Excitation, double>>& terms) {
  std::vector<detail::PreparedExcitation> prep;
  prep.reserve(terms.size());
  for (const auto& [mu, v] : terms) {
    if (v == 0.0) continue;
    prep.push_back({mu.holes(), mu.particles(), mu.hole_list(), mu.particle_list(), v});
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t col = 0; col < space.size(); ++col) {
    const Bits ket = space[col].bits();
    for (const auto& x : prep) {
      Bits occ = ket;
      int sign = 1;
      if (!detail::apply_prepared(x, occ, sign)) continue;
      if (auto row = space.find(occ)) trip.emplace_back(static_cast<int>(*row), static_cast<int>(col), sign * x.value);
    }
  }
  const auto n = static_cast<Eigen::Index>(space.size());
  SparseMatrix t(n, n);
  t.setFromTriplets(trip.begin(), trip.end());
  return t;
}

inline SparseMatrix cluster_matrix(const DeterminantSpace& space, const AmplitudeVector& t) {
  std::vector<std::pair<Excitation, double>> terms(t.entries().begin(), t.entries().end());
  return cluster_matrix(space, terms);
}

inline SparseMatrix cluster_matrix(const DeterminantSpace& space, const ExcitationSet& set, const Eigen::VectorXd& values) {
  std::vector<std::pair<Excitation, double>> terms;
  terms.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) terms.emplace_back(set[i], values[static_cast<Eigen::Index>(i)]);
  return cluster_matrix(space, terms);
}

/// Applies a single excitation operator X_mu to a vector.
inline Eigen::VectorXd apply_excitation_operator(const DeterminantSpace& space, const Excitation& mu,
                                                 const Eigen::VectorXd& v) {
  const detail::PreparedExcitation x{mu.holes(), mu.particles(), mu.hole_list(), mu.particle_list(), 1.0};
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (Eigen::Index col = 0; col < v.size(); ++col) {
    if (v[col] == 0.0) continue;
    Bits occ = space[static_cast<std::size_t>(col)].bits();
    int sign = 1;
    if (!detail::apply_prepared(x, occ, sign)) continue;
    if (auto row = space.find(occ)) out[static_cast<Eigen::Index>(*row)] += sign * v[col];
  }
  return out;
}

/// exp(scale * T) v by the terminating power series.
inline Eigen::VectorXd exp_apply(const SparseMatrix& t, const Eigen::VectorXd& v, double scale = 1.0) {
  Eigen::VectorXd out = v;
  Eigen::VectorXd term = v;
  for (int m = 1; m <= kMaxOrbitals + 1; ++m) {
    term = (scale / m) * (t * term);
    if (term.squaredNorm() == 0.0) break;
    out += term;
  }
  return out;
}

/// log(I + S) v = sum_m (-1)^(m+1) S^m v / m, S nilpotent.
inline Eigen::VectorXd log_apply(const SparseMatrix& s, const Eigen::VectorXd& v) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXd power = v;
  for (int m = 1; m <= kMaxOrbitals + 1; ++m) {
    power = s * power;
    if (power.squaredNorm() == 0.0) break;
    out += ((m % 2 == 1) ? 1.0 : -1.0) / m * power;
  }
  return out;
}

/// e^{-T} H e^{T} v, no truncation.
inline Eigen::VectorXd similarity_apply(const SparseMatrix& t, const SparseMatrix& h, const Eigen::VectorXd& v) {
  if (v.size() != h.cols() || t.cols() != h.cols()) fail(ErrorKind::DimensionMismatch, "similarity transform sizes");
  return exp_apply(t, h * exp_apply(t, v), -1.0);
}

}  // namespace tcc
