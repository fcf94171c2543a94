#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace tcc;

namespace {

double oracle_element(const oracle::Sparse& h, Bits bra, Bits ket) {
  return h.coeff(static_cast<Eigen::Index>(bra), static_cast<Eigen::Index>(ket));
}

}  // namespace

TEST(Models, HubbardTwoSiteFreeFermions) {
  const auto ints = fixtures::model("hubbard:2,1,0");
  EXPECT_NEAR(fci_solve(ints, ints.basis()).summary.eigenvalues[0], -2.0, 1e-12);
}

TEST(Models, HubbardTwoSiteAnalytic) {
  for (double u : {0.5, 4.0, 8.0}) {
    for (bool orbital : {true, false}) {
      HubbardSpec spec;
      spec.u = u;
      spec.orbital_basis = orbital;
      const auto ints = hubbard_model(spec);
      const double want = u / 2 - std::sqrt(u * u / 4 + 4.0);
      EXPECT_NEAR(fci_solve(ints, ints.basis()).summary.eigenvalues[0], want, 1e-12) << u;
    }
  }
}

TEST(Models, PairingWithoutCoupling) {
  const auto ints = fixtures::model("pairing:4,0,1.5");
  // Four electrons fill levels 0 and 1 twice.
  EXPECT_NEAR(fci_solve(ints, ints.basis()).summary.eigenvalues[0], 2 * (0.0 + 1.5), 1e-12);
}

TEST(Models, SizeLimitAndParseErrors) {
  try {
    fixtures::model("hubbard:11,1,1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SizeLimit);
  }
  EXPECT_THROW(fixtures::model("hubbard:2,1"), Error);
  EXPECT_THROW(fixtures::model("ising:2,1,1"), Error);
  EXPECT_THROW(fixtures::model("hubbard:2,x,1"), Error);
}

TEST(Models, Deterministic) {
  const auto a = fixtures::model("hubbard:5,1,3");
  const auto b = fixtures::model("hubbard:5,1,3");
  std::ostringstream sa, sb;
  write_fcidump(sa, a);
  write_fcidump(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(MatrixElement, SlaterCondonMatchesOracle) {
  std::mt19937_64 rng(11);
  for (const auto& fx : fixtures::small()) {
    const int K = fx.ints.n_spin_orbitals();
    const oracle::Ladder L(K);
    const auto h = L.hamiltonian(fx.ints);
    const auto dets = enumerate_determinants(fx.ints.basis(false));
    double worst = 0.0;
    for (const auto& bra : dets)
      for (const auto& ket : dets)
        worst = std::max(worst, std::abs(matrix_element(bra, ket, fx.ints) - oracle_element(h, bra.bits(), ket.bits())));
    EXPECT_LE(worst, 1e-12) << fx.name;
  }
}

TEST(MatrixElement, TripleDifferenceVanishes) {
  const auto ints = oracle::random_integrals(4, 3, 3);
  EXPECT_EQ(matrix_element(Determinant::from_orbitals({0, 1, 2}), Determinant::from_orbitals({3, 4, 5}), ints), 0.0);
}

TEST(MatrixElement, Symmetric) {
  const auto ints = oracle::random_integrals(4, 3, 5);
  const DeterminantSpace space(ints.basis(false));
  const Eigen::MatrixXd h = hamiltonian_matrix(space, ints);
  EXPECT_EQ((h - h.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ApplyHamiltonian, LinearAndSymmetric) {
  const auto ints = fixtures::model("pairing:4,0.5,1");
  const DeterminantSpace space(ints.basis());
  const auto h = hamiltonian_matrix(space, ints);
  std::mt19937_64 rng(2);
  const auto u = oracle::random_normalized(space, rng).coeffs;
  const auto v = oracle::random_normalized(space, rng).coeffs;
  EXPECT_NEAR((apply_hamiltonian(h, 0.3 * u + 1.7 * v) - 0.3 * apply_hamiltonian(h, u) - 1.7 * apply_hamiltonian(h, v))
                  .cwiseAbs()
                  .maxCoeff(),
              0.0, 1e-12);
  EXPECT_NEAR(u.dot(apply_hamiltonian(h, v)), apply_hamiltonian(h, u).dot(v), 1e-12);
  const Eigen::VectorXd col = Eigen::MatrixXd(h).col(static_cast<Eigen::Index>(space.reference_index()));
  EXPECT_EQ((apply_hamiltonian(h, space.reference_vector()) - col).cwiseAbs().maxCoeff(), 0.0);
  try {
    apply_hamiltonian(h, Eigen::VectorXd::Zero(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Fock, FreeModelGivesBareLevels) {
  const auto ints = fixtures::model("pairing:4,0,1");
  const auto fock = fock_matrix(ints, ints.basis());
  for (int p = 0; p < 8; ++p) EXPECT_DOUBLE_EQ(fock.lambda[p], (p / 2) * 1.0);
  EXPECT_DOUBLE_EQ(fock.lambda0, fock.lambda.head(4).sum());
  EXPECT_TRUE(fock.warnings.empty());
}

TEST(Fock, OddHubbardIsNonCanonical) {
  const auto ints = fixtures::model("hubbard:3,1,2");
  const auto fock = fock_matrix(ints, ints.basis());
  EXPECT_GT(fock.off_diag_norm, 1e-8);
  EXPECT_EQ(fock.warnings, std::vector<std::string>{"NonCanonicalOrbitals"});
}

TEST(Fock, DiagonalActionOnExcitedDeterminants) {
  // With a diagonal Fock matrix, F phi_mu = (Lambda0 + eps_mu) phi_mu and
  // [F, X_mu] d = eps_mu X_mu d on every determinant.
  for (const char* spec : {"hubbard:4,1,2", "pairing:4,0.5,1"}) {
    const auto ints = fixtures::model(spec);
    const auto basis = ints.basis();
    const auto fock = fock_matrix(ints, basis);
    ASSERT_LE(fock.off_diag_norm, 1e-12);
    const DeterminantSpace space(basis);
    const Eigen::MatrixXd f = one_body_operator(space, fock.matrix);
    for (const auto& mu : full_excitation_set(basis)) {
      const Eigen::VectorXd x0 = apply_excitation_operator(space, mu, space.reference_vector());
      if (x0.norm() == 0.0) continue;
      EXPECT_LE((f * x0 - (fock.lambda0 + fock.epsilon(mu)) * x0).cwiseAbs().maxCoeff(), 1e-12) << mu.to_string();
      for (std::size_t d = 0; d < space.size(); ++d) {
        const Eigen::VectorXd e = space.unit(d);
        const Eigen::VectorXd comm =
            f * apply_excitation_operator(space, mu, e) - apply_excitation_operator(space, mu, f * e);
        EXPECT_LE((comm - fock.epsilon(mu) * apply_excitation_operator(space, mu, e)).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(Fluctuation, SplitsHamiltonianExactly) {
  const auto ints = fixtures::model("hubbard:2,1,4");
  const DeterminantSpace space(ints.basis());
  const auto h = hamiltonian_matrix(space, ints);
  const auto fock = fock_matrix(ints, ints.basis());
  const Eigen::VectorXd fd = fock_diagonal(space, fock);
  std::mt19937_64 rng(4);
  const auto v = oracle::random_normalized(space, rng).coeffs;
  EXPECT_LE((fluctuation_apply(h, fd, v) + fd.cwiseProduct(v) - apply_hamiltonian(h, v)).cwiseAbs().maxCoeff(), 1e-12);
  // <phi0, W phi0> against the oracle: <phi0|H|phi0> - Lambda0.
  const oracle::Ladder L(4);
  const double h00 = oracle_element(L.hamiltonian(ints), 0b11, 0b11);
  EXPECT_NEAR(fluctuation_apply(h, fd, space.reference_vector())[space.reference_index()], h00 - fock.lambda0, 1e-12);
}

TEST(Fluctuation, FreeModelLeavesOnlyCore) {
  auto ints = fixtures::model("pairing:4,0,1");
  ints.e_core = 0.25;
  const DeterminantSpace space(ints.basis());
  const auto h = hamiltonian_matrix(space, ints);
  const Eigen::VectorXd fd = fock_diagonal(space, fock_matrix(ints, ints.basis()));
  std::mt19937_64 rng(5);
  const auto v = oracle::random_normalized(space, rng).coeffs;
  EXPECT_LE((fluctuation_apply(h, fd, v) - 0.25 * v).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Integrals, PermutationIsExact) {
  const auto ints = oracle::random_integrals(4, 2, 9);
  const std::vector<int> order{2, 0, 3, 1};
  const auto p = ints.permuted(order);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      EXPECT_EQ(p.h(a, b), ints.h(order[a], order[b]));
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) EXPECT_EQ(p.g(a, b, c, d), ints.g(order[a], order[b], order[c], order[d]));
    }
  // The spectrum does not depend on the labels.
  const double e0 = fci_solve(ints, ints.basis()).summary.eigenvalues[0];
  EXPECT_NEAR(fci_solve(p, p.basis()).summary.eigenvalues[0], e0, 1e-12);
}
