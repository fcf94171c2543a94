#pragma once

// Dense FCI and CAS-FCI oracles plus the exact maps between CI vectors and
// cluster amplitudes.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tcc/amplitudes.hpp"
#include "tcc/cluster.hpp"
#include "tcc/error.hpp"
#include "tcc/hamiltonian.hpp"
#include "tcc/integrals.hpp"

namespace tcc {

inline constexpr std::size_t kMaxDenseDimension = 20000;
inline constexpr double kDegeneracyTolerance = 1e-10;
inline constexpr double kZeroOverlapTolerance = 1e-12;

enum class CiNormalization { L2, Intermediate };

inline std::string to_string(CiNormalization n) { return n == CiNormalization::L2 ? "L2" : "INTERMEDIATE"; }

/// Coefficients in the order of a full DeterminantSpace.
struct CiVector {
  Eigen::VectorXd coeffs;
  CiNormalization normalization = CiNormalization::L2;
  std::string basis_tag = "FULL";
};

struct SpectralSummary {
  std::vector<double> eigenvalues;  // the requested lowest ones, ascending
  double gap = std::numeric_limits<double>::infinity();  // E_1 - E_0; infinite for a 1-dim space
  int state = 0;
  std::size_t dimension = 0;
  std::vector<std::string> warnings;
};

struct EigenResult {
  SpectralSummary summary;
  std::vector<CiVector> states;
};

namespace detail {

inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best]) + 1e-12) best = i;
  if (v[best] < 0) v = -v;
}

/// Dense eigensolve of a symmetric block; vectors are columns in block order.
inline EigenResult dense_eigen(const SparseMatrix& h, int n_states, const std::string& tag) {
  const auto dim = static_cast<std::size_t>(h.rows());
  if (dim > kMaxDenseDimension)
    fail(ErrorKind::DimensionLimit, "dimension " + std::to_string(dim) + " exceeds the dense limit " +
                                        std::to_string(kMaxDenseDimension));
  if (n_states < 1 || static_cast<std::size_t>(n_states) > dim)
    fail(ErrorKind::InvalidArgument, "n_states must lie in 1.." + std::to_string(dim));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(h)};
  if (es.info() != Eigen::Success) fail(ErrorKind::SolverFailure, "dense eigensolver failed");
  Eigen::MatrixXd vecs = es.eigenvectors();
  const Eigen::VectorXd& vals = es.eigenvalues();

  EigenResult out;
  out.summary.dimension = dim;
  if (dim > 1) out.summary.gap = vals[1] - vals[0];
  if (out.summary.gap < kDegeneracyTolerance) {
    out.summary.warnings.push_back("DegenerateGroundState");
    // Pick the member of the ground block with the largest weight on the
    // lowest determinant that overlaps the block.
    Eigen::Index m = 1;
    while (m < static_cast<Eigen::Index>(dim) && vals[m] - vals[0] < kDegeneracyTolerance) ++m;
    const Eigen::MatrixXd block = vecs.leftCols(m);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(dim); ++j) {
      Eigen::VectorXd proj = block * block.row(j).transpose();
      if (proj.norm() > 1e-8) {
        vecs.col(0) = proj.normalized();
        break;
      }
    }
  }
  for (int s = 0; s < n_states; ++s) {
    out.summary.eigenvalues.push_back(vals[s]);
    CiVector v;
    v.coeffs = vecs.col(s);
    detail::fix_sign(v.coeffs);
    v.basis_tag = tag;
    out.states.push_back(std::move(v));
  }
  return out;
}

}  // namespace detail

inline EigenResult fci_solve(const DeterminantSpace& space, const SparseMatrix& h, int n_states = 1) {
  if (static_cast<std::size_t>(h.rows()) != space.size()) fail(ErrorKind::DimensionMismatch, "H and space differ");
  return detail::dense_eigen(h, n_states, "FULL");
}

inline EigenResult fci_solve(const IntegralSet& ints, const OrbitalBasis& basis, int n_states = 1) {
  const DeterminantSpace space(basis);
  return fci_solve(space, hamiltonian_matrix(space, ints), n_states);
}

/// Eigenpairs of P H P on the CAS determinants, embedded into `full` order.
inline EigenResult cas_fci_solve(const IntegralSet& ints, const DeterminantSpace& full, const BasisSplit& split,
                                 int n_states = 1) {
  const DeterminantSpace cas(full.basis(), split);
  auto res = detail::dense_eigen(hamiltonian_matrix(cas, ints), n_states, "CAS:" + std::to_string(split.k));
  for (auto& v : res.states) {
    Eigen::VectorXd emb = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(full.size()));
    for (std::size_t i = 0; i < cas.size(); ++i)
      emb[static_cast<Eigen::Index>(*full.find(cas[i].bits()))] = v.coeffs[static_cast<Eigen::Index>(i)];
    v.coeffs = std::move(emb);
  }
  return res;
}

inline CiVector intermediate_normalized(const CiVector& psi, const DeterminantSpace& space) {
  if (static_cast<std::size_t>(psi.coeffs.size()) != space.size())
    fail(ErrorKind::DimensionMismatch, "CI vector length differs from the space");
  const double c0 = psi.coeffs[static_cast<Eigen::Index>(space.reference_index())];
  if (std::abs(c0) < kZeroOverlapTolerance)
    fail(ErrorKind::ZeroReferenceOverlap, "reference coefficient " + std::to_string(c0) + " is below 1e-12");
  CiVector out = psi;
  out.coeffs /= c0;
  out.normalization = CiNormalization::Intermediate;
  return out;
}

/// T = log(I + S) with S read off the intermediately normalized vector.
inline AmplitudeVector ci_to_cluster(const CiVector& psi, const DeterminantSpace& space,
                                     AmplitudeSpace tag = AmplitudeSpace::Full) {
  const CiVector c = intermediate_normalized(psi, space);
  const OrbitalBasis& basis = space.basis();
  const std::size_t ref = space.reference_index();
  std::vector<std::pair<Excitation, double>> s_terms;
  std::vector<SignedExcitation> map(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (i == ref) continue;
    map[i] = *excitation_from_reference(space[i], basis);
    const double ci = c.coeffs[static_cast<Eigen::Index>(i)];
    if (ci != 0.0) s_terms.emplace_back(map[i].mu, map[i].sign * ci);
  }
  const Eigen::VectorXd l = log_apply(cluster_matrix(space, s_terms), space.reference_vector());
  AmplitudeVector t(tag);
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (i == ref) continue;
    const double v = l[static_cast<Eigen::Index>(i)];
    if (v != 0.0) t.set(map[i].mu, map[i].sign * v);
  }
  return t;
}

/// e^T phi_0, intermediately normalized by construction.
inline CiVector cluster_to_ci(const AmplitudeVector& t, const DeterminantSpace& space) {
  CiVector out;
  out.coeffs = exp_apply(cluster_matrix(space, t), space.reference_vector());
  out.normalization = CiNormalization::Intermediate;
  return out;
}

/// Splits a full amplitude vector into its CAS and external parts.
inline std::pair<AmplitudeVector, AmplitudeVector> split_amplitudes(const AmplitudeVector& t, const BasisSplit& split) {
  AmplitudeVector cas(AmplitudeSpace::Cas), ext(AmplitudeSpace::Ext);
  for (const auto& [mu, v] : t.entries())
    (classify_excitation(mu, split) == SpaceClass::Cas ? cas : ext).set(mu, v);
  return {cas, ext};
}

}  // namespace tcc
