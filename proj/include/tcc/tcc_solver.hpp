#pragma once

// Linked TCC equations: the TCC function f(t; t_cas), the energy functional,
// truncated external spaces and a damped quasi-Newton solve.

#include <Eigen/Dense>
#include <cmath>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "tcc/amplitudes.hpp"
#include "tcc/cluster.hpp"
#include "tcc/error.hpp"
#include "tcc/hamiltonian.hpp"
#include "tcc/integrals.hpp"

namespace tcc {

enum class TruncationMode { ReferenceRooted, FirstOrderInteraction, FullExt };

struct TruncationScheme {
  TruncationMode mode = TruncationMode::FullExt;
  int n = 0;

  static TruncationScheme full() { return {TruncationMode::FullExt, 0}; }
  static TruncationScheme rank(int n) { return {TruncationMode::ReferenceRooted, n}; }
  static TruncationScheme foi(int n) { return {TruncationMode::FirstOrderInteraction, n}; }

  /// "sd", "rank:N", "foi:N" or "full".
  static TruncationScheme parse(const std::string& text) {
    if (text == "full") return full();
    if (text == "sd") return rank(2);
    auto number = [&](std::size_t from) {
      const std::string tail = text.substr(from);
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(tail, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != tail.size() || v < 1) fail(ErrorKind::InvalidArgument, "bad truncation '" + text + "'");
      return v;
    };
    if (text.rfind("rank:", 0) == 0) return rank(number(5));
    if (text.rfind("foi:", 0) == 0) return foi(number(4));
    fail(ErrorKind::InvalidArgument, "unknown truncation '" + text + "'; use sd, rank:N, foi:N or full");
  }

  std::string to_string() const {
    switch (mode) {
      case TruncationMode::ReferenceRooted: return "rank:" + std::to_string(n);
      case TruncationMode::FirstOrderInteraction: return "foi:" + std::to_string(n);
      case TruncationMode::FullExt: return "full";
    }
    return "?";
  }
};

inline ExcitationSet enumerate_truncated_space(const BasisSplit& split, const TruncationScheme& scheme,
                                               const OrbitalBasis& basis) {
  std::vector<Excitation> out;
  for (const auto& mu : enumerate_excitations(basis, basis.n_electrons)) {
    if (classify_excitation(mu, split) != SpaceClass::Ext) continue;
    switch (scheme.mode) {
      case TruncationMode::ReferenceRooted:
        if (mu.rank() <= scheme.n) out.push_back(mu);
        break;
      case TruncationMode::FirstOrderInteraction:
        if (std::popcount(mu.particles() & ~split.cas_bits()) <= scheme.n) out.push_back(mu);
        break;
      case TruncationMode::FullExt:
        out.push_back(mu);
        break;
    }
  }
  return ExcitationSet(basis, std::move(out));
}

/// Everything needed to evaluate f, the energy and their derivatives for one
/// Hamiltonian and split. Amplitudes are dense vectors over an ExcitationSet.
class TccProblem {
 public:
  TccProblem(const IntegralSet& ints, const OrbitalBasis& basis, const BasisSplit& split)
      : basis_(basis), split_(split), space_(basis), h_(hamiltonian_matrix(space_, ints)),
        fock_(fock_matrix(ints, basis)) {
    ext_ = enumerate_truncated_space(split, TruncationScheme::full(), basis);
    cas_ = cas_excitation_set(basis, split);
    ref_ = space_.reference_index();
    h_ref_row_ = h_.transpose() * space_.reference_vector();
  }

  const OrbitalBasis& basis() const { return basis_; }
  const BasisSplit& split() const { return split_; }
  const DeterminantSpace& space() const { return space_; }
  const SparseMatrix& h() const { return h_; }
  const FockSpectrum& fock() const { return fock_; }
  const ExcitationSet& ext_set() const { return ext_; }
  const ExcitationSet& cas_set() const { return cas_; }
  ExcitationSet truncated_set(const TruncationScheme& scheme) const {
    return enumerate_truncated_space(split_, scheme, basis_);
  }

  struct State {
    SparseMatrix s;        // T_ext + T_cas
    Eigen::VectorXd psi;   // e^S phi_0
    Eigen::VectorXd hpsi;  // H e^S phi_0
    Eigen::VectorXd r;     // e^-S H e^S phi_0
  };

  State state(const ExcitationSet& set, const Eigen::VectorXd& t, const Eigen::VectorXd& t_cas) const {
    if (static_cast<std::size_t>(t.size()) != set.size() || static_cast<std::size_t>(t_cas.size()) != cas_.size())
      fail(ErrorKind::DimensionMismatch, "amplitude length differs from its index set");
    std::vector<std::pair<Excitation, double>> terms;
    terms.reserve(set.size() + cas_.size());
    for (std::size_t i = 0; i < set.size(); ++i) terms.emplace_back(set[i], t[static_cast<Eigen::Index>(i)]);
    for (std::size_t i = 0; i < cas_.size(); ++i) terms.emplace_back(cas_[i], t_cas[static_cast<Eigen::Index>(i)]);
    State st;
    st.s = cluster_matrix(space_, terms);
    st.psi = exp_apply(st.s, space_.reference_vector());
    st.hpsi = h_ * st.psi;
    st.r = exp_apply(st.s, st.hpsi, -1.0);
    return st;
  }

  /// <phi_mu, v> for every mu in `rows`, phi_mu = X_mu phi_0.
  Eigen::VectorXd project(const ExcitationSet& rows, const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      out[static_cast<Eigen::Index>(i)] = rows.ref_sign(i) * v[index_of(rows.target(i))];
    return out;
  }

  Eigen::VectorXd residual(const ExcitationSet& set, const Eigen::VectorXd& t, const Eigen::VectorXd& t_cas) const {
    return project(set, state(set, t, t_cas).r);
  }

  /// Residual on `rows` with the amplitudes living on `set`.
  Eigen::VectorXd residual(const ExcitationSet& set, const Eigen::VectorXd& t, const Eigen::VectorXd& t_cas,
                           const ExcitationSet& rows) const {
    return project(rows, state(set, t, t_cas).r);
  }

  /// <phi_0, H e^S phi_0>; the left factor e^-S drops out against phi_0.
  double energy(const ExcitationSet& set, const Eigen::VectorXd& t, const Eigen::VectorXd& t_cas) const {
    return h_ref_row_.dot(state(set, t, t_cas).psi);
  }
  double energy(const State& st) const { return h_ref_row_.dot(st.psi); }

  /// d f_rows / d t_cols at the given point: columns e^-S [H, X_nu] e^S phi_0.
  Eigen::MatrixXd jacobian(const ExcitationSet& set, const Eigen::VectorXd& t, const Eigen::VectorXd& t_cas,
                           const ExcitationSet& rows, const ExcitationSet& cols) const {
    const State st = state(set, t, t_cas);
    Eigen::MatrixXd j(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const Eigen::VectorXd xpsi = apply_excitation_operator(space_, cols[c], st.psi);
      const Eigen::VectorXd xhpsi = apply_excitation_operator(space_, cols[c], st.hpsi);
      const Eigen::VectorXd col = exp_apply(st.s, h_ * xpsi - xhpsi, -1.0);
      j.col(static_cast<Eigen::Index>(c)) = project(rows, col);
    }
    return j;
  }

  /// dE/dt_nu = <phi_0, H X_nu e^S phi_0>.
  Eigen::VectorXd energy_gradient(const ExcitationSet& set, const Eigen::VectorXd& t, const Eigen::VectorXd& t_cas,
                                  const ExcitationSet& cols) const {
    const State st = state(set, t, t_cas);
    Eigen::VectorXd g(static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
      g[static_cast<Eigen::Index>(c)] = h_ref_row_.dot(apply_excitation_operator(space_, cols[c], st.psi));
    return g;
  }

  /// Dense CAS amplitudes from a sparse vector; entries must be CAS indices.
  Eigen::VectorXd cas_dense(const AmplitudeVector& t_cas) const {
    if (t_cas.space() != AmplitudeSpace::Cas && !t_cas.empty())
      fail(ErrorKind::SpaceMismatch, "CAS amplitudes carry the tag " + to_string(t_cas.space()));
    t_cas.check_space(split_);
    return t_cas.to_dense(cas_);
  }

  Eigen::Index index_of(const Determinant& d) const {
    auto i = space_.find(d.bits());
    if (!i) fail(ErrorKind::SpaceMismatch, "determinant " + d.to_string() + " outside the space");
    return static_cast<Eigen::Index>(*i);
  }

 private:
  OrbitalBasis basis_;
  BasisSplit split_;
  DeterminantSpace space_;
  SparseMatrix h_;
  FockSpectrum fock_;
  ExcitationSet ext_;
  ExcitationSet cas_;
  std::size_t ref_ = 0;
  Eigen::VectorXd h_ref_row_;
};

struct TccConfig {
  int max_iterations = 500;
  double tolerance = 1e-10;  // applied to both the l2 and the V_ext dual residual norm
  double damping = 1.0;
  int diis = 0;              // history length, 0 disables
  bool newton = false;       // exact-Jacobian steps instead of D^-1
  double divergence_bound = 1e3;
  TruncationScheme truncation = TruncationScheme::full();

  void validate() const {
    if (!(tolerance > 0.0)) fail(ErrorKind::InvalidArgument, "tolerance must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) fail(ErrorKind::InvalidArgument, "damping must lie in (0,1]");
    if (diis < 0) fail(ErrorKind::InvalidArgument, "DIIS length must be nonnegative");
    if (max_iterations < 0) fail(ErrorKind::InvalidArgument, "max_iterations must be nonnegative");
  }
};

struct IterationRecord {
  int iteration = 0;
  double residual_l2 = 0.0;
  double residual_v = 0.0;  // eps-weighted dual norm
  double energy = 0.0;
};

struct TccResult {
  AmplitudeVector t{AmplitudeSpace::Truncated};
  ExcitationSet set;
  Eigen::VectorXd t_dense;
  double energy = 0.0;
  std::vector<IterationRecord> history;
  bool converged = false;
  int iterations = 0;
  std::string status;  // converged | max_iterations | diverged
};

namespace detail {

/// Pulay extrapolation over stored (amplitude, error) pairs.
class Diis {
 public:
  explicit Diis(int length) : length_(length) {}

  Eigen::VectorXd push(const Eigen::VectorXd& t, const Eigen::VectorXd& err) {
    ts_.push_back(t);
    errs_.push_back(err);
    if (static_cast<int>(ts_.size()) > length_) {
      ts_.pop_front();
      errs_.pop_front();
    }
    const auto m = static_cast<Eigen::Index>(ts_.size());
    if (m < 2) return t;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) b(i, j) = errs_[i].dot(errs_[j]);
      b(i, m) = b(m, i) = -1.0;
    }
    rhs[m] = -1.0;
    const double scale = b.topLeftCorner(m, m).diagonal().maxCoeff();
    if (!(scale > 0.0)) return t;
    b.topLeftCorner(m, m) /= scale;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(b);
    if (qr.rank() < m + 1) return t;
    const Eigen::VectorXd c = qr.solve(rhs);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(t.size());
    for (Eigen::Index i = 0; i < m; ++i) out += c[i] * ts_[i];
    return out;
  }

 private:
  int length_;
  std::deque<Eigen::VectorXd> ts_;
  std::deque<Eigen::VectorXd> errs_;
};

}  // namespace detail

/// Solves P_d f(t; t_cas) = 0 on `set` starting from t = 0.
inline TccResult solve_tcc(const TccProblem& problem, const ExcitationSet& set, const Eigen::VectorXd& t_cas,
                           const TccConfig& config) {
  config.validate();
  const Eigen::VectorXd eps = set.epsilons(problem.fock());
  if (eps.size() > 0 && eps.minCoeff() <= 0.0)
    fail(ErrorKind::GapViolation, "min epsilon over the external set is " + std::to_string(eps.minCoeff()));

  TccResult res;
  res.set = set;
  res.status = "max_iterations";
  Eigen::VectorXd t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.size()));
  detail::Diis diis(config.diis);

  for (int it = 0;; ++it) {
    const auto st = problem.state(set, t, t_cas);
    const Eigen::VectorXd f = problem.project(set, st.r);
    IterationRecord rec{it, f.norm(), weighted_dual_norm(f, eps), problem.energy(st)};
    res.history.push_back(rec);
    res.iterations = it;
    if (rec.residual_l2 <= config.tolerance && rec.residual_v <= config.tolerance) {
      res.converged = true;
      res.status = "converged";
      break;
    }
    if (it >= config.max_iterations) break;

    Eigen::VectorXd step;
    if (config.newton) {
      const Eigen::MatrixXd j = problem.jacobian(set, t, t_cas, set, set);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(j);
      if (!lu.isInvertible()) fail(ErrorKind::SingularJacobian, "Jacobian is singular during Newton steps");
      step = lu.solve(f);
    } else {
      step = f.cwiseQuotient(eps);
    }
    Eigen::VectorXd next = t - config.damping * step;
    if (config.diis > 0) next = diis.push(next, step);
    t = std::move(next);
    if (weighted_norm(t, eps) > config.divergence_bound) {
      res.status = "diverged";
      const auto st2 = problem.state(set, t, t_cas);
      const Eigen::VectorXd f2 = problem.project(set, st2.r);
      res.history.push_back({it + 1, f2.norm(), weighted_dual_norm(f2, eps), problem.energy(st2)});
      res.iterations = it + 1;
      break;
    }
  }
  res.t_dense = t;
  res.t = AmplitudeVector::from_dense(AmplitudeSpace::Truncated, set, t, config.truncation.to_string());
  res.energy = res.history.back().energy;
  return res;
}

inline TccResult solve_tcc(const TccProblem& problem, const AmplitudeVector& t_cas, const TccConfig& config) {
  return solve_tcc(problem, problem.truncated_set(config.truncation), problem.cas_dense(t_cas), config);
}

namespace detail {

inline Eigen::VectorXd ext_dense(const TccProblem& p, const AmplitudeVector& t, const ExcitationSet& set) {
  if (t.space() == AmplitudeSpace::Cas || t.space() == AmplitudeSpace::Full) {
    if (!t.empty()) fail(ErrorKind::SpaceMismatch, "external amplitudes carry the tag " + to_string(t.space()));
  }
  t.check_space(p.split());
  return t.to_dense(set);
}

}  // namespace detail

/// P_d f(t; t_cas) as an amplitude-indexed vector on the truncated set.
inline AmplitudeVector tcc_residual(const AmplitudeVector& t, const AmplitudeVector& t_cas, const TccProblem& problem,
                                    const TruncationScheme& scheme) {
  const ExcitationSet set = problem.truncated_set(scheme);
  const Eigen::VectorXd f = problem.residual(set, detail::ext_dense(problem, t, set), problem.cas_dense(t_cas));
  AmplitudeVector out(AmplitudeSpace::Truncated, scheme.to_string());
  for (std::size_t i = 0; i < set.size(); ++i) out.set(set[i], f[static_cast<Eigen::Index>(i)]);
  return out;
}

inline AmplitudeVector tcc_residual(const AmplitudeVector& t, const AmplitudeVector& t_cas, const IntegralSet& ints,
                                    const BasisSplit& split, const TruncationScheme& scheme) {
  const TccProblem problem(ints, ints.basis(), split);
  return tcc_residual(t, t_cas, problem, scheme);
}

inline double tcc_energy(const AmplitudeVector& t, const AmplitudeVector& t_cas, const TccProblem& problem) {
  const ExcitationSet& set = problem.ext_set();
  return problem.energy(set, detail::ext_dense(problem, t, set), problem.cas_dense(t_cas));
}

inline double tcc_energy(const AmplitudeVector& t, const AmplitudeVector& t_cas, const IntegralSet& ints,
                         const BasisSplit& split) {
  const TccProblem problem(ints, ints.basis(), split);
  return tcc_energy(t, t_cas, problem);
}

}  // namespace tcc
