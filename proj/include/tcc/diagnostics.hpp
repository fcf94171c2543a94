#pragma once

// Computable versions of the analysis: gaps, Assumption (B) quantities,
// sampled monotonicity and Lipschitz constants, the Fock-norm identity, dual
// solves, the energy-error split and the quadratic scaling study.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tcc/amplitudes.hpp"
#include "tcc/cluster.hpp"
#include "tcc/error.hpp"
#include "tcc/exact_solvers.hpp"
#include "tcc/hamiltonian.hpp"
#include "tcc/tcc_solver.hpp"

namespace tcc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------- gaps

struct GapReport {
  double eps0 = kInf;      // lambda_{k+1} - lambda_k, infinite when k = K
  double eps0_ext = kInf;  // lambda_{k+1} - lambda_N
  double homo_lumo = 0.0;  // lambda_{N+1} - lambda_N
  double min_eps_ext = kInf;
  bool ext_positive = true;
  std::vector<std::string> flags;
};

inline GapReport gap_report(const FockSpectrum& fock, const BasisSplit& split, const OrbitalBasis& basis) {
  GapReport g;
  const int N = basis.n_electrons, k = split.k, K = basis.n_orbitals;
  // 1-based lambda_p is fock.lambda[p-1].
  g.homo_lumo = fock.lambda[N] - fock.lambda[N - 1];
  if (k < K) {
    g.eps0 = fock.lambda[k] - fock.lambda[k - 1];
    g.eps0_ext = fock.lambda[k] - fock.lambda[N - 1];
  }
  const ExcitationSet ext = enumerate_truncated_space(split, TruncationScheme::full(), basis);
  for (const auto& mu : ext) g.min_eps_ext = std::min(g.min_eps_ext, fock.epsilon(mu));
  g.ext_positive = ext.empty() || g.min_eps_ext > 0.0;
  if (g.eps0 <= 0.0) g.flags.push_back("GapViolation");
  if (!g.ext_positive) g.flags.push_back("NonPositiveExternalWeight");
  if (!fock.is_diagonal()) g.flags.push_back("NonCanonicalOrbitals");
  return g;
}

// ---------------------------------------------------------------- sampling

namespace detail {

/// Point t_star + r * delta * u / |u|_V with u Gaussian and r uniform in (0,1].
inline Eigen::VectorXd sample_ball(std::mt19937_64& rng, const Eigen::VectorXd& center, const Eigen::VectorXd& eps,
                                   double delta) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd u(center.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = normal(rng);
  const double n = weighted_norm(u, eps);
  const double r = 1.0 - unif(rng);
  return center + (delta * r / n) * u;
}

/// Sample pairs in B_delta(center): random pairs followed by the axis pairs
/// center +- (delta/2) e_mu / sqrt(eps_mu).
inline std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> sample_pairs(const Eigen::VectorXd& center,
                                                                             const Eigen::VectorXd& eps, double delta,
                                                                             int samples, std::uint64_t seed) {
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> out;
  if (center.size() == 0) return out;
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd a = sample_ball(rng, center, eps, delta);
    Eigen::VectorXd b = sample_ball(rng, center, eps, delta);
    out.emplace_back(std::move(a), std::move(b));
  }
  for (Eigen::Index m = 0; m < center.size(); ++m) {
    Eigen::VectorXd step = Eigen::VectorXd::Zero(center.size());
    step[m] = 0.5 * delta / std::sqrt(eps[m]);
    out.emplace_back(center + step, center - step);
  }
  return out;
}

}  // namespace detail

struct ProbeResult {
  double gamma_hat = kInf;     // min <df, dt> / |dt|_V^2
  double L_hat = 0.0;          // max |df|_V' / |dt|_V
  double gamma_hat_l2 = kInf;  // min <df, dt> / |dt|_2^2
  double L_hat_l2 = 0.0;       // max |df|_2 / |dt|_2
  int pairs = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr double kReferenceResidual = 1e-8;

namespace detail {

inline void require_reference(const TccProblem& p, const ExcitationSet& set, const Eigen::VectorXd& t_star,
                              const Eigen::VectorXd& t_cas) {
  if (static_cast<std::size_t>(t_star.size()) != set.size())
    fail(ErrorKind::MissingReference, "reference amplitudes do not match the external set");
  const double r = p.residual(set, t_star, t_cas).norm();
  if (!(r <= kReferenceResidual))
    fail(ErrorKind::MissingReference, "reference residual " + std::to_string(r) + " is not converged");
}

}  // namespace detail

/// Sampled monotonicity and Lipschitz constants of f(.; t_cas) on B_delta(t_star).
inline ProbeResult monotonicity_probe(const TccProblem& p, const ExcitationSet& set, const Eigen::VectorXd& t_star,
                                      const Eigen::VectorXd& t_cas, double delta, int samples, std::uint64_t seed) {
  detail::require_reference(p, set, t_star, t_cas);
  const Eigen::VectorXd eps = set.epsilons(p.fock());
  if (eps.size() > 0 && eps.minCoeff() <= 0.0) fail(ErrorKind::NonPositiveWeight, "external epsilon is not positive");
  ProbeResult out;
  out.delta = delta;
  out.seed = seed;
  for (const auto& [a, b] : detail::sample_pairs(t_star, eps, delta, samples, seed)) {
    const Eigen::VectorXd dt = a - b;
    if (dt.squaredNorm() == 0.0) continue;
    const Eigen::VectorXd df = p.residual(set, a, t_cas) - p.residual(set, b, t_cas);
    const double inner = df.dot(dt);
    const double nv = weighted_norm(dt, eps);
    out.gamma_hat = std::min(out.gamma_hat, inner / (nv * nv));
    out.L_hat = std::max(out.L_hat, weighted_dual_norm(df, eps) / nv);
    out.gamma_hat_l2 = std::min(out.gamma_hat_l2, inner / dt.squaredNorm());
    out.L_hat_l2 = std::max(out.L_hat_l2, df.norm() / dt.norm());
    ++out.pairs;
  }
  return out;
}

// ---------------------------------------------------------------- Assumption (B)

struct AssumptionReport {
  GapReport gaps;
  double omega0 = 0.0;
  double omega_cas = 0.0;
  double lipschitz_star = 0.0;
  double margin = kInf;
  ProbeResult probe;
  int samples = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

/// Operator A = W_c - P W_c P with W_c = e^-Tc W e^Tc, applied to vectors.
class CasFluctuation {
 public:
  CasFluctuation(const TccProblem& p, const Eigen::VectorXd& t_cas)
      : p_(p), tc_(cluster_matrix(p.space(), p.cas_set(), t_cas)), w_(fluctuation_matrix(p.h(), fock_diagonal(p.space(), p.fock()))),
        mask_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.space().size()))) {
    for (std::size_t i = 0; i < p.space().size(); ++i)
      if (p.split().is_cas_determinant(p.space()[i].bits())) mask_[static_cast<Eigen::Index>(i)] = 1.0;
  }

  Eigen::VectorXd wc(const Eigen::VectorXd& v) const { return exp_apply(tc_, w_ * exp_apply(tc_, v), -1.0); }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    return wc(v) - mask_.cwiseProduct(wc(mask_.cwiseProduct(v)));
  }

  /// O(t) = e^-T A e^T phi_0 - A phi_0.
  Eigen::VectorXd o_map(const ExcitationSet& set, const Eigen::VectorXd& t) const {
    const SparseMatrix tm = cluster_matrix(p_.space(), set, t);
    const Eigen::VectorXd phi0 = p_.space().reference_vector();
    return exp_apply(tm, apply(exp_apply(tm, phi0)), -1.0) - apply(phi0);
  }

  double omega0() const {
    return wc(p_.space().reference_vector())[static_cast<Eigen::Index>(p_.space().reference_index())];
  }

 private:
  const TccProblem& p_;
  SparseMatrix tc_;
  SparseMatrix w_;
  Eigen::VectorXd mask_;
};

inline AssumptionReport assumption_b_report(const TccProblem& p, const Eigen::VectorXd& t_cas,
                                            const std::optional<Eigen::VectorXd>& t_star, double delta, int samples,
                                            std::uint64_t seed) {
  if (!t_star) fail(ErrorKind::MissingReference, "Assumption (B) needs a converged external solution");
  const ExcitationSet& set = p.ext_set();
  detail::require_reference(p, set, *t_star, t_cas);
  AssumptionReport r;
  r.gaps = gap_report(p.fock(), p.split(), p.basis());
  r.samples = samples;
  r.delta = delta;
  r.seed = seed;

  const CasFluctuation a(p, t_cas);
  r.omega0 = a.omega0();
  const Eigen::VectorXd eps_cas = p.cas_set().epsilons(p.fock());
  r.omega_cas = (t_cas.array() * eps_cas.array()).abs().sum();

  if (!set.empty()) {
    const Eigen::VectorXd eps = set.epsilons(p.fock());
    if (eps.minCoeff() <= 0.0) fail(ErrorKind::NonPositiveWeight, "external epsilon is not positive");
    for (const auto& [x, y] : detail::sample_pairs(*t_star, eps, delta, samples, seed)) {
      const double dn = (x - y).norm();
      if (dn == 0.0) continue;
      r.lipschitz_star = std::max(r.lipschitz_star, (a.o_map(set, x) - a.o_map(set, y)).norm() / dn);
    }
    r.probe = monotonicity_probe(p, set, *t_star, t_cas, delta, samples, seed);
  }
  r.margin = r.gaps.eps0 - r.omega0 - r.omega_cas - r.lipschitz_star;
  return r;
}

// ---------------------------------------------------------------- Fock norm

struct FockNormCheck {
  double deviation = 0.0;
  double v_norm = 0.0;
  double fock_norm = 0.0;
  double rho = 1.0;  // |T|_{L2 -> F} / |t|_V
};

/// Compares |t|_V with sqrt(<T phi0, (F - Lambda0) T phi0>) using the explicit
/// one-body Fock operator, and estimates the operator-norm ratio.
inline FockNormCheck fock_norm_identity_check(const DeterminantSpace& space, const FockSpectrum& fock,
                                              const ExcitationSet& set, const Eigen::VectorXd& t) {
  FockNormCheck out;
  const Eigen::VectorXd eps = set.epsilons(fock);
  out.v_norm = std::sqrt((eps.array() * t.array().square()).sum());
  const SparseMatrix tm = cluster_matrix(space, set, t);
  const Eigen::VectorXd phi0 = space.reference_vector();
  const Eigen::VectorXd x = tm * phi0;
  const SparseMatrix f = one_body_operator(space, fock.matrix);
  const double q = x.dot(f * x) - fock.lambda0 * x.squaredNorm();
  out.fock_norm = std::sqrt(std::max(q, 0.0));
  out.deviation = std::abs(out.v_norm - out.fock_norm);

  if (out.v_norm == 0.0) return out;
  Eigen::VectorXd w = fock_diagonal(space, fock).array() - fock.lambda0;
  w = w.cwiseMax(0.0);
  // Power iteration on T^t diag(w) T, started from phi_0.
  Eigen::VectorXd v = phi0;
  double lam = 0.0;
  for (int it = 0; it < 5000; ++it) {
    Eigen::VectorXd y = tm.transpose() * w.cwiseProduct(tm * v);
    const double ny = y.norm();
    if (ny == 0.0) break;
    const double next = v.dot(y);
    v = y / ny;
    if (std::abs(next - lam) <= 1e-15 * std::abs(next)) {
      lam = next;
      break;
    }
    lam = next;
  }
  const double rq = v.dot(tm.transpose() * w.cwiseProduct(tm * v));
  lam = std::max({lam, rq, out.v_norm * out.v_norm});
  out.rho = std::sqrt(lam) / out.v_norm;
  return out;
}

// ---------------------------------------------------------------- dual

/// z with J(t)^T z = E'(t) on `set`.
inline Eigen::VectorXd solve_dual(const TccProblem& p, const ExcitationSet& set, const Eigen::VectorXd& t,
                                  const Eigen::VectorXd& t_cas) {
  if (set.empty()) return Eigen::VectorXd();
  const Eigen::MatrixXd j = p.jacobian(set, t, t_cas, set, set);
  const Eigen::VectorXd g = p.energy_gradient(set, t, t_cas, set);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(j.transpose());
  if (!lu.isInvertible() || lu.rcond() < 1e-14)
    fail(ErrorKind::SingularJacobian, "Jacobian is singular; monotonicity fails at this point");
  return lu.solve(g);
}

/// Largest entry of J - J_fd relative to max(1, max|J|), central differences.
inline double jacobian_fd_error(const TccProblem& p, const ExcitationSet& set, const Eigen::VectorXd& t,
                                const Eigen::VectorXd& t_cas, double h = 1e-5) {
  const Eigen::MatrixXd j = p.jacobian(set, t, t_cas, set, set);
  double worst = 0.0;
  for (Eigen::Index c = 0; c < j.cols(); ++c) {
    Eigen::VectorXd tp = t, tm = t;
    tp[c] += h;
    tm[c] -= h;
    const Eigen::VectorXd col = (p.residual(set, tp, t_cas) - p.residual(set, tm, t_cas)) / (2 * h);
    worst = std::max(worst, (col - j.col(c)).cwiseAbs().maxCoeff());
  }
  return j.size() == 0 ? 0.0 : worst / std::max(1.0, j.cwiseAbs().maxCoeff());
}

// ---------------------------------------------------------------- error representation

struct RemainderCheck {
  double remainder = 0.0;  // R
  double error_norm = 0.0; // |t_* - t_d|_V
  double ratio = 0.0;      // |R| / |t_* - t_d|_V^3, 0 when the error vanishes
};

/// R = 2(E(t_*) - E(t_d)) - rho(t_d)(z_* - z_d) - rho*(t_d, z_d)(t_* - t_d) with
/// rho(t_d)(u) = -<f(t_d), u> and rho*(t_d, z_d)(u) = E'(t_d)u - <f'(t_d)u, z_d>.
/// t_star and z_star live on the full external set, t_d and z_d on `set_d`.
inline RemainderCheck error_representation_check(const TccProblem& p, const ExcitationSet& set_d,
                                                 const Eigen::VectorXd& t_d, const Eigen::VectorXd& z_d,
                                                 const Eigen::VectorXd& t_star, const Eigen::VectorXd& z_star,
                                                 const Eigen::VectorXd& t_cas) {
  const ExcitationSet& ext = p.ext_set();
  const Eigen::VectorXd td_full = ext.embed(set_d, t_d);
  const Eigen::VectorXd zd_full = ext.embed(set_d, z_d);
  const Eigen::VectorXd e = t_star - td_full;
  const Eigen::VectorXd f_d = p.residual(ext, td_full, t_cas);
  const Eigen::VectorXd g_d = p.energy_gradient(ext, td_full, t_cas, ext);
  double dual_term = 0.0;
  if (!set_d.empty()) dual_term = z_d.dot(p.jacobian(ext, td_full, t_cas, set_d, ext) * e);
  const double rho = -f_d.dot(z_star - zd_full);
  const double rho_star = g_d.dot(e) - dual_term;
  RemainderCheck out;
  out.remainder = 2.0 * (p.energy(ext, t_star, t_cas) - p.energy(ext, td_full, t_cas)) - rho - rho_star;
  out.error_norm = weighted_norm(e, ext.epsilons(p.fock()));
  if (out.error_norm > 0.0) out.ratio = std::abs(out.remainder) / std::pow(out.error_norm, 3);
  return out;
}

// ---------------------------------------------------------------- error decomposition

enum class CasSource { CasFci, Perturbed };

struct ErrorDecomposition {
  double dE = 0.0;
  double d_eps = 0.0;
  double d_eps_cas = 0.0;
  double d_eps_cas_star = 0.0;
  double dE_cas = 0.0;
  double triangle_slack = 0.0;
  double t_star_vs_tilde = 0.0;  // |t_* - t~_*|_V
  double e_fci = 0.0;
  double e_cas_fci = 0.0;
  double e_tcc = 0.0;  // E(t_d; t_cas)
  std::string truncation;
  std::string cas_source;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

/// Exact reference data shared by the decomposition and the scaling study.
struct ReferenceData {
  double e_fci = 0.0;
  double e_cas_fci = 0.0;
  Eigen::VectorXd t_star_cas;  // FCI amplitudes split onto the CAS set
  Eigen::VectorXd t_star_ext;  // ... and onto the external set
  Eigen::VectorXd t_fci_cas;   // amplitudes of the CAS-FCI state
};

inline ReferenceData reference_data(const TccProblem& p, const IntegralSet& ints) {
  ReferenceData r;
  const auto fci = fci_solve(p.space(), p.h());
  r.e_fci = fci.summary.eigenvalues[0];
  const AmplitudeVector t_full = ci_to_cluster(fci.states[0], p.space());
  auto [tc, te] = split_amplitudes(t_full, p.split());
  r.t_star_cas = tc.to_dense(p.cas_set());
  r.t_star_ext = te.to_dense(p.ext_set());
  const auto cas = cas_fci_solve(ints, p.space(), p.split());
  r.e_cas_fci = cas.summary.eigenvalues[0];
  r.t_fci_cas = ci_to_cluster(cas.states[0], p.space(), AmplitudeSpace::Cas).to_dense(p.cas_set());
  return r;
}

/// Solver settings used for the reference roots inside the diagnostics.
inline TccConfig diagnostic_solver_config() {
  TccConfig c;
  c.tolerance = 1e-12;
  c.max_iterations = 2000;
  c.diis = 8;
  return c;
}

namespace detail {

inline Eigen::VectorXd converged_root(const TccProblem& p, const ExcitationSet& set, const Eigen::VectorXd& t_cas,
                                      const TccConfig& config, const std::string& what) {
  TccResult r = solve_tcc(p, set, t_cas, config);
  if (!r.converged) {
    // Fall back to exact-Jacobian steps before giving up.
    TccConfig newton = config;
    newton.newton = true;
    newton.diis = 0;
    newton.max_iterations = 100;
    r = solve_tcc(p, set, t_cas, newton);
  }
  if (!r.converged) fail(ErrorKind::SolverFailure, what + " did not converge (" + r.status + ")");
  return r.t_dense;
}

/// <phi_0, e^-Tc P H P e^Tc phi_0>.
inline double projected_cas_energy(const TccProblem& p, const Eigen::VectorXd& t_cas) {
  const SparseMatrix tc = cluster_matrix(p.space(), p.cas_set(), t_cas);
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.space().size()));
  for (std::size_t i = 0; i < p.space().size(); ++i)
    if (p.split().is_cas_determinant(p.space()[i].bits())) mask[static_cast<Eigen::Index>(i)] = 1.0;
  const Eigen::VectorXd psi = exp_apply(tc, p.space().reference_vector());
  const Eigen::VectorXd y = exp_apply(tc, mask.cwiseProduct(p.h() * mask.cwiseProduct(psi)), -1.0);
  return y[static_cast<Eigen::Index>(p.space().reference_index())];
}

}  // namespace detail

inline Eigen::VectorXd perturbed_cas(const Eigen::VectorXd& t_cas, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd out = t_cas;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += noise * normal(rng);
  return out;
}

inline ErrorDecomposition error_decomposition(const TccProblem& p, const IntegralSet& ints,
                                              const TruncationScheme& scheme, CasSource source, double noise,
                                              std::uint64_t seed, const TccConfig& config = diagnostic_solver_config()) {
  const ReferenceData ref = reference_data(p, ints);
  const Eigen::VectorXd t_cas =
      source == CasSource::CasFci ? ref.t_fci_cas : perturbed_cas(ref.t_fci_cas, noise, seed);
  const ExcitationSet& ext = p.ext_set();
  const ExcitationSet set_d = p.truncated_set(scheme);

  const Eigen::VectorXd t_star = detail::converged_root(p, ext, t_cas, config, "t_*");
  const Eigen::VectorXd t_tilde = source == CasSource::CasFci
                                      ? t_star
                                      : detail::converged_root(p, ext, ref.t_fci_cas, config, "t~_*");
  const Eigen::VectorXd t_d =
      scheme.mode == TruncationMode::FullExt ? t_star : detail::converged_root(p, set_d, t_cas, config, "t_d");

  ErrorDecomposition d;
  d.truncation = scheme.to_string();
  d.cas_source = source == CasSource::CasFci ? "CAS_FCI" : "PERTURBED";
  d.noise = source == CasSource::CasFci ? 0.0 : noise;
  d.seed = seed;
  d.e_fci = ref.e_fci;
  d.e_cas_fci = ref.e_cas_fci;

  const double e_d = p.energy(ext, ext.embed(set_d, t_d), t_cas);
  const double e_star = p.energy(ext, t_star, t_cas);
  const double e_star_fci_cas = p.energy(ext, t_star, ref.t_fci_cas);
  const double e_exact = p.energy(ext, ref.t_star_ext, ref.t_star_cas);
  d.e_tcc = e_d;
  d.dE = std::abs(e_d - e_exact);
  d.d_eps = std::abs(e_d - e_star);
  d.d_eps_cas = std::abs(e_star - e_star_fci_cas);
  d.d_eps_cas_star = std::abs(e_star_fci_cas - e_exact);
  d.dE_cas = std::abs(detail::projected_cas_energy(p, t_cas) - detail::projected_cas_energy(p, ref.t_fci_cas));
  d.triangle_slack = d.d_eps + d.d_eps_cas + d.d_eps_cas_star - d.dE;
  if (!ext.empty()) d.t_star_vs_tilde = weighted_norm(t_star - t_tilde, ext.epsilons(p.fock()));
  return d;
}

// ---------------------------------------------------------------- scaling study

struct ScalingRow {
  std::string truncation;
  std::size_t dimension = 0;
  double distance = 0.0;       // |t_d - t_*|_V
  double d_eps = 0.0;          // |E(t_d) - E(t_*)|
  double dual_distance = 0.0;  // |z_d - z_*|_V
  double remainder = 0.0;      // R of the error representation
  double remainder_ratio = 0.0;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  double slope = std::numeric_limits<double>::quiet_NaN();
  int fitted_points = 0;
  bool linearized = false;
};

inline constexpr double kFitDistanceFloor = 1e-12;

/// Least-squares slope of log d_eps against log distance over rows with a
/// nonzero distance.
inline void fit_slope(ScalingStudy& s) {
  std::vector<double> x, y;
  for (const auto& r : s.rows)
    if (r.distance > kFitDistanceFloor && r.d_eps > 0.0) {
      x.push_back(std::log(r.distance));
      y.push_back(std::log(r.d_eps));
    }
  s.fitted_points = static_cast<int>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / std::max<std::size_t>(x.size(), 1);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / std::max<std::size_t>(y.size(), 1);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (x.size() < 2 || !(sxx > 1e-24)) fail(ErrorKind::InsufficientPoints, "need two distinct distances for a slope fit");
  s.slope = sxy / sxx;
}

/// Nested truncations against the full external root for a fixed t_cas.
inline ScalingStudy quadratic_scaling_study(const TccProblem& p, const std::vector<TruncationScheme>& family,
                                            const Eigen::VectorXd& t_cas,
                                            const TccConfig& config = diagnostic_solver_config()) {
  if (family.size() < 3) fail(ErrorKind::InsufficientPoints, "a scaling study needs at least three truncations");
  const ExcitationSet& ext = p.ext_set();
  const Eigen::VectorXd eps = ext.epsilons(p.fock());
  const Eigen::VectorXd t_star = detail::converged_root(p, ext, t_cas, config, "t_*");
  const Eigen::VectorXd z_star = solve_dual(p, ext, t_star, t_cas);
  const double e_star = p.energy(ext, t_star, t_cas);
  ScalingStudy s;
  for (const auto& scheme : family) {
    const ExcitationSet set = p.truncated_set(scheme);
    const Eigen::VectorXd t_d =
        set.size() == ext.size() ? ext.restrict_to(set, t_star) : detail::converged_root(p, set, t_cas, config, "t_d");
    const Eigen::VectorXd z_d = solve_dual(p, set, t_d, t_cas);
    ScalingRow row;
    row.truncation = scheme.to_string();
    row.dimension = set.size();
    row.distance = weighted_norm(t_star - ext.embed(set, t_d), eps);
    row.d_eps = std::abs(p.energy(ext, ext.embed(set, t_d), t_cas) - e_star);
    row.dual_distance = weighted_norm(z_star - ext.embed(set, z_d), eps);
    const RemainderCheck rc = error_representation_check(p, set, t_d, z_d, t_star, z_star, t_cas);
    row.remainder = rc.remainder;
    row.remainder_ratio = rc.ratio;
    s.rows.push_back(row);
  }
  fit_slope(s);
  return s;
}

/// The same study for the linearization f(t) = f(0) + diag(eps) t,
/// E(t) = E(0) + E'(0) t around t = 0. Every quantity has a closed form.
inline ScalingStudy linearized_scaling_study(const TccProblem& p, const std::vector<TruncationScheme>& family,
                                             const Eigen::VectorXd& t_cas) {
  if (family.size() < 3) fail(ErrorKind::InsufficientPoints, "a scaling study needs at least three truncations");
  const ExcitationSet& ext = p.ext_set();
  const Eigen::VectorXd eps = ext.epsilons(p.fock());
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ext.size()));
  const Eigen::VectorXd f0 = p.residual(ext, zero, t_cas);
  const Eigen::VectorXd g0 = p.energy_gradient(ext, zero, t_cas, ext);
  const double e0 = p.energy(ext, zero, t_cas);
  auto energy = [&](const Eigen::VectorXd& t) { return e0 + g0.dot(t); };
  auto residual = [&](const Eigen::VectorXd& t) -> Eigen::VectorXd { return f0 + eps.cwiseProduct(t); };

  const Eigen::VectorXd t_star = -f0.cwiseQuotient(eps);
  const Eigen::VectorXd z_star = g0.cwiseQuotient(eps);
  ScalingStudy s;
  s.linearized = true;
  for (const auto& scheme : family) {
    const ExcitationSet set = p.truncated_set(scheme);
    Eigen::VectorXd mask = ext.embed(set, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(set.size())));
    const Eigen::VectorXd t_d = mask.cwiseProduct(t_star);
    const Eigen::VectorXd z_d = mask.cwiseProduct(z_star);
    const Eigen::VectorXd e = t_star - t_d;
    ScalingRow row;
    row.truncation = scheme.to_string();
    row.dimension = set.size();
    row.distance = weighted_norm(e, eps);
    row.d_eps = std::abs(energy(t_d) - energy(t_star));
    row.dual_distance = weighted_norm(z_star - z_d, eps);
    const double rho = -residual(t_d).dot(z_star - z_d);
    const double rho_star = g0.dot(e) - z_d.dot(eps.cwiseProduct(e));
    row.remainder = 2.0 * (energy(t_star) - energy(t_d)) - rho - rho_star;
    if (row.distance > 0.0) row.remainder_ratio = std::abs(row.remainder) / std::pow(row.distance, 3);
    s.rows.push_back(row);
  }
  fit_slope(s);
  return s;
}

}  // namespace tcc
