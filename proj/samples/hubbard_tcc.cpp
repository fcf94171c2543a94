// Hubbard chain: FCI, entropy-selected CAS, then TCC with singles and doubles.

#include <cstdio>

#include "tcc/workbench.hpp"

int main() {
  using namespace tcc;
  const IntegralSet ints = hubbard_model({.sites = 4, .hopping = 1.0, .u = 2.0});
  const OrbitalBasis basis = ints.basis();
  const DeterminantSpace space(basis);
  const auto fci = fci_solve(space, hamiltonian_matrix(space, ints));
  std::printf("E_FCI      %.12f  (dim %zu)\n", fci.summary.eigenvalues[0], space.size());

  const auto profile = mutual_information(fci.states[0], space);
  const auto sel = select_cas(profile, basis.n_electrons, 0.2, 0.2, SelectionMode::Threshold);

  const IntegralSet relabelled = ints.permuted(sel.order);
  const BasisSplit split = BasisSplit::make(basis, sel.k);
  const TccProblem p(relabelled, basis, split);
  const auto cas = cas_fci_solve(relabelled, p.space(), split);
  const Eigen::VectorXd t_cas = ci_to_cluster(cas.states[0], p.space(), AmplitudeSpace::Cas).to_dense(p.cas_set());
  std::printf("E_CAS      %.12f  (k = %d)\n", cas.summary.eigenvalues[0], split.k);

  TccConfig config;
  config.truncation = TruncationScheme::rank(2);
  config.diis = 6;
  const TccResult res = solve_tcc(p, p.truncated_set(config.truncation), t_cas, config);
  std::printf("E_TCC(SD)  %.12f  %s after %d iterations\n", res.energy, res.status.c_str(), res.iterations);
  return res.converged ? 0 : 1;
}
