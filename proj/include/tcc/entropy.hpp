#pragma once

// Orbital reduced density matrices, entropies, mutual information and the
// entropy-driven choice of the active space.

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "tcc/error.hpp"
#include "tcc/exact_solvers.hpp"
#include "tcc/hamiltonian.hpp"

namespace tcc {

inline constexpr double kNormTolerance = 1e-10;

namespace detail {

inline void require_normalized(const CiVector& psi, const DeterminantSpace& space) {
  if (static_cast<std::size_t>(psi.coeffs.size()) != space.size())
    fail(ErrorKind::DimensionMismatch, "CI vector length differs from the space");
  const double n = psi.coeffs.norm();
  if (std::abs(n - 1.0) > kNormTolerance)
    fail(ErrorKind::NotNormalized, "state norm is " + std::to_string(n));
}

inline void check_orbital(const DeterminantSpace& space, int i) {
  if (i < 0 || i >= space.basis().n_orbitals) fail(ErrorKind::IndexOutOfRange, "orbital " + std::to_string(i));
}

}  // namespace detail

/// diag(1 - <n_i>, <n_i>); off-diagonals vanish for a fixed particle number.
inline Eigen::Matrix2d one_orbital_rdm(const CiVector& psi, const DeterminantSpace& space, int i) {
  detail::require_normalized(psi, space);
  detail::check_orbital(space, i);
  double n = 0.0;
  for (std::size_t d = 0; d < space.size(); ++d)
    if (space[d].occupied(i)) n += psi.coeffs[static_cast<Eigen::Index>(d)] * psi.coeffs[static_cast<Eigen::Index>(d)];
  Eigen::Matrix2d rho = Eigen::Matrix2d::Zero();
  rho(0, 0) = 1.0 - n;
  rho(1, 1) = n;
  return rho;
}

/// Two-orbital RDM in the local basis |m_i m_j>, row index 2*m_i + m_j.
inline Eigen::Matrix4d two_orbital_rdm(const CiVector& psi, const DeterminantSpace& space, int i, int j) {
  if (i == j) fail(ErrorKind::SameOrbital, "two-orbital RDM needs i != j");
  detail::require_normalized(psi, space);
  detail::check_orbital(space, i);
  detail::check_orbital(space, j);
  Eigen::Matrix4d rho = Eigen::Matrix4d::Zero();
  for (std::size_t d = 0; d < space.size(); ++d) {
    const double c = psi.coeffs[static_cast<Eigen::Index>(d)];
    if (c == 0.0) continue;
    const Determinant det = space[d];
    const int mi = det.occupied(i), mj = det.occupied(j);
    rho(2 * mi + mj, 2 * mi + mj) += c * c;
    if (mi == 1 && mj == 0) {
      // <psi| a+_j a_i |psi>; the Jordan-Wigner string counts the electrons
      // strictly between i and j.
      if (auto e = space.find(det.bits() ^ bit(i) ^ bit(j))) {
        const Bits between = low_mask(std::max(i, j)) & ~low_mask(std::min(i, j) + 1);
        const double sign = std::popcount(det.bits() & between) & 1 ? -1.0 : 1.0;
        const double v = sign * c * psi.coeffs[static_cast<Eigen::Index>(*e)];
        rho(2, 1) += v;
        rho(1, 2) += v;
      }
    }
  }
  return rho;
}

inline double von_neumann_entropy(const Eigen::MatrixXd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double w = es.eigenvalues()[k];
    if (w > 0.0) s -= w * std::log(w);
  }
  return s;
}

struct OrbitalEntropyProfile {
  Eigen::VectorXd s1;  // s(i)
  Eigen::MatrixXd s2;  // s(i,j), zero on the diagonal
  Eigen::MatrixXd mi;  // I(i,j) = s(i) + s(j) - s(i,j), I(i,i) = 0
  std::string source;
};

inline OrbitalEntropyProfile mutual_information(const CiVector& psi, const DeterminantSpace& space,
                                                std::string source = "state") {
  const int K = space.basis().n_orbitals;
  OrbitalEntropyProfile p;
  p.source = std::move(source);
  p.s1.resize(K);
  p.s2 = Eigen::MatrixXd::Zero(K, K);
  p.mi = Eigen::MatrixXd::Zero(K, K);
  for (int i = 0; i < K; ++i) p.s1[i] = von_neumann_entropy(one_orbital_rdm(psi, space, i));
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j) {
      const double s = von_neumann_entropy(two_orbital_rdm(psi, space, i, j));
      p.s2(i, j) = p.s2(j, i) = s;
      p.mi(i, j) = p.mi(j, i) = p.s1[i] + p.s1[j] - s;
    }
  return p;
}

enum class SelectionMode { Threshold, Jump };

/// Active-space proposal at the spatial-orbital level. The permutation
/// `order` (new spatial p = old order[p]) makes the CAS contiguous.
struct CasSelection {
  std::vector<int> spatial;  // selected spatial orbitals in original labels, occupied ones included
  std::vector<int> order;
  int k = 0;
  std::vector<std::string> warnings;
  double jump_ratio = 0.0;
  double jump_cut = 0.0;  // smallest I value kept in JUMP mode
};

namespace detail {

inline bool passes(double value, double threshold) { return threshold == 0.0 ? true : value > threshold; }

}  // namespace detail

/// Orbitals with s(i) above s_threshold or some I(i,j) above mi_threshold
/// (THRESHOLD), or the orbitals of the pairs above the largest ratio drop in
/// the descending list of I values (JUMP). A threshold of 0 admits everything.
inline CasSelection select_cas(const OrbitalEntropyProfile& profile, int n_electrons, double s_threshold,
                               double mi_threshold, SelectionMode mode) {
  if (s_threshold < 0.0 || mi_threshold < 0.0) fail(ErrorKind::InvalidArgument, "thresholds must be nonnegative");
  const int K = static_cast<int>(profile.s1.size());
  if (K % 2 != 0) fail(ErrorKind::InvalidArgument, "profile must cover both spins of every spatial orbital");
  const int n_spatial = K / 2;
  std::vector<bool> chosen(K, false);
  CasSelection out;

  if (mode == SelectionMode::Threshold) {
    for (int i = 0; i < K; ++i) {
      bool hit = detail::passes(profile.s1[i], s_threshold);
      for (int j = 0; j < K && !hit; ++j)
        if (j != i && detail::passes(profile.mi(i, j), mi_threshold)) hit = true;
      chosen[i] = hit;
    }
  } else {
    struct Pair {
      double v;
      int i, j;
    };
    std::vector<Pair> pairs;
    double top = 0.0;
    for (int i = 0; i < K; ++i)
      for (int j = i + 1; j < K; ++j) top = std::max(top, profile.mi(i, j));
    const double noise = std::max(1e-14, 1e-10 * top);
    for (int i = 0; i < K; ++i)
      for (int j = i + 1; j < K; ++j)
        if (profile.mi(i, j) > noise) pairs.push_back({profile.mi(i, j), i, j});
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.v > b.v; });
    std::size_t cut = pairs.size();  // keep pairs[0..cut)
    if (pairs.size() >= 2) {
      std::vector<double> ratio;
      for (std::size_t m = 0; m + 1 < pairs.size(); ++m) ratio.push_back(pairs[m].v / pairs[m + 1].v);
      const double best = *std::max_element(ratio.begin(), ratio.end());
      out.jump_ratio = best;
      if (best <= 1.0 + 1e-12) {
        // Flat list: every entangled pair belongs to the same group.
        out.warnings.push_back("NoJump");
      } else {
        int ties = 0;
        for (std::size_t m = 0; m < ratio.size(); ++m) {
          if (ratio[m] < best * (1.0 - 1e-12)) continue;
          if (ties++ == 0) cut = m + 1;
        }
        if (ties > 1) out.warnings.push_back("JumpTie");
      }
    }
    if (cut > 0) out.jump_cut = pairs[cut - 1].v;
    for (std::size_t m = 0; m < cut; ++m) chosen[pairs[m].i] = chosen[pairs[m].j] = true;
  }

  const int n_occ_spatial = (n_electrons + 1) / 2;
  std::vector<int> extra, rest;
  for (int p = n_occ_spatial; p < n_spatial; ++p) (chosen[2 * p] || chosen[2 * p + 1] ? extra : rest).push_back(p);
  for (int p = 0; p < n_occ_spatial; ++p) out.spatial.push_back(p);
  out.spatial.insert(out.spatial.end(), extra.begin(), extra.end());
  out.order = out.spatial;
  out.order.insert(out.order.end(), rest.begin(), rest.end());
  if (extra.empty()) {
    out.k = n_electrons;
    out.warnings.push_back("EmptySelection");
  } else {
    out.k = 2 * static_cast<int>(out.spatial.size());
  }
  return out;
}

}  // namespace tcc
