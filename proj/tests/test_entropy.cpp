#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace tcc;

namespace {

CiVector ground_state(const IntegralSet& ints, const DeterminantSpace& space) {
  return fci_solve(space, hamiltonian_matrix(space, ints)).states[0];
}

OrbitalEntropyProfile synthetic(int K) {
  OrbitalEntropyProfile p;
  p.s1 = Eigen::VectorXd::Zero(K);
  p.s2 = Eigen::MatrixXd::Zero(K, K);
  p.mi = Eigen::MatrixXd::Zero(K, K);
  return p;
}

void set_mi(OrbitalEntropyProfile& p, int i, int j, double v) { p.mi(i, j) = p.mi(j, i) = v; }

bool has(const std::vector<std::string>& w, const std::string& s) {
  return std::find(w.begin(), w.end(), s) != w.end();
}

}  // namespace

TEST(Entropy, SingleDeterminantIsUnentangled) {
  const DeterminantSpace space(OrbitalBasis::make(6, 3));
  CiVector psi;
  psi.coeffs = space.reference_vector();
  const auto p = mutual_information(psi, space);
  EXPECT_EQ(p.s1.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(p.mi.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Entropy, OneElectronInTwoOrbitals) {
  const DeterminantSpace space(OrbitalBasis::make(2, 1));
  CiVector psi;
  psi.coeffs = Eigen::Vector2d(1.0, 1.0) / std::sqrt(2.0);
  const auto p = mutual_information(psi, space);
  EXPECT_NEAR(p.s1[0], std::log(2.0), 1e-15);
  EXPECT_NEAR(p.s1[1], std::log(2.0), 1e-15);
  EXPECT_NEAR(p.s2(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(p.mi(0, 1), 2 * std::log(2.0), 1e-15);
  const Eigen::Matrix4d rho = two_orbital_rdm(psi, space, 0, 1);
  EXPECT_NEAR(rho(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(rho(2, 2), 0.5, 1e-15);
  EXPECT_NEAR(rho(1, 2), 0.5, 1e-15);
}

TEST(Entropy, RdmsMatchOracle) {
  std::mt19937_64 rng(23);
  for (const auto& fx : fixtures::small()) {
    const int K = fx.ints.n_spin_orbitals();
    if (K > 6) continue;
    const oracle::Ladder L(K);
    const DeterminantSpace space(fx.ints.basis(false));
    for (const auto& psi : {ground_state(fx.ints, space), oracle::random_normalized(space, rng)}) {
      const Eigen::VectorXd u = oracle::embed(psi, space);
      for (int i = 0; i < K; ++i) {
        EXPECT_LE((one_orbital_rdm(psi, space, i) - oracle::one_orbital_rdm(u, i)).cwiseAbs().maxCoeff(), 1e-12);
        for (int j = 0; j < K; ++j) {
          if (i == j) continue;
          const Eigen::Matrix4d got = two_orbital_rdm(psi, space, i, j);
          EXPECT_LE((got - oracle::two_orbital_rdm(L, u, i, j)).cwiseAbs().maxCoeff(), 1e-12)
              << fx.name << " " << i << "," << j;
          EXPECT_LE(oracle::off_block_max(L, u, i, j), 1e-12);
        }
      }
    }
  }
}

TEST(Entropy, BoundsAndSymmetry) {
  for (const auto& fx : fixtures::small()) {
    const DeterminantSpace space(fx.ints.basis());
    const auto p = mutual_information(ground_state(fx.ints, space), space);
    const int K = static_cast<int>(p.s1.size());
    for (int i = 0; i < K; ++i) {
      EXPECT_GE(p.s1[i], 0.0);
      EXPECT_LE(p.s1[i], std::log(2.0) + 1e-12);
      EXPECT_EQ(p.mi(i, i), 0.0);
      for (int j = 0; j < K; ++j) {
        EXPECT_EQ(p.mi(i, j), p.mi(j, i));
        if (i == j) continue;
        EXPECT_LE(p.s2(i, j), std::log(4.0) + 1e-12);
        EXPECT_GE(p.mi(i, j), -1e-12) << fx.name;
        EXPECT_LE(p.mi(i, j), 2 * std::min(p.s1[i], p.s1[j]) + 1e-10);
      }
    }
  }
}

TEST(Entropy, RelabelingIsEquivariant) {
  const auto ints = oracle::random_integrals(4, 2, 31);
  const std::vector<int> order{3, 1, 0, 2};
  const auto perm = ints.permuted(order);
  const DeterminantSpace a(ints.basis()), b(perm.basis());
  const auto pa = mutual_information(ground_state(ints, a), a);
  const auto pb = mutual_information(ground_state(perm, b), b);
  auto old_label = [&](int so) { return 2 * order[so / 2] + so % 2; };
  for (int i = 0; i < 8; ++i) {
    EXPECT_NEAR(pb.s1[i], pa.s1[old_label(i)], 1e-10);
    for (int j = 0; j < 8; ++j) EXPECT_NEAR(pb.mi(i, j), pa.mi(old_label(i), old_label(j)), 1e-10);
  }
}

TEST(Entropy, InputErrors) {
  const DeterminantSpace space(OrbitalBasis::make(4, 2));
  CiVector psi;
  psi.coeffs = 2.0 * space.reference_vector();
  try {
    mutual_information(psi, space);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotNormalized);
  }
  psi.coeffs = space.reference_vector();
  try {
    two_orbital_rdm(psi, space, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SameOrbital);
  }
  try {
    one_orbital_rdm(psi, space, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
}

TEST(SelectCas, ZeroThresholdsAdmitEverything) {
  const auto ints = fixtures::model("hubbard:4,1,2");
  const DeterminantSpace space(ints.basis());
  const auto p = mutual_information(ground_state(ints, space), space);
  const auto sel = select_cas(p, 4, 0.0, 0.0, SelectionMode::Threshold);
  EXPECT_EQ(sel.k, 8);
  EXPECT_EQ(sel.order, (std::vector<int>{0, 1, 2, 3}));
}

TEST(SelectCas, EmptyProfileFallsBackToReference) {
  const auto sel = select_cas(synthetic(8), 4, 0.1, 0.1, SelectionMode::Threshold);
  EXPECT_EQ(sel.k, 4);
  EXPECT_TRUE(has(sel.warnings, "EmptySelection"));
  EXPECT_EQ(sel.spatial, (std::vector<int>{0, 1}));
}

TEST(SelectCas, ThresholdPicksEntangledOrbital) {
  auto p = synthetic(8);
  set_mi(p, 0, 4, 0.5);
  set_mi(p, 1, 5, 0.5);
  set_mi(p, 0, 6, 0.001);
  const auto sel = select_cas(p, 2, 1.0, 0.01, SelectionMode::Threshold);
  EXPECT_EQ(sel.k, 4);
  EXPECT_EQ(sel.spatial, (std::vector<int>{0, 2}));
  EXPECT_EQ(sel.order, (std::vector<int>{0, 2, 1, 3}));
  // Strict inequality: a value equal to the threshold stays out.
  EXPECT_EQ(select_cas(p, 2, 1.0, 0.5, SelectionMode::Threshold).k, 2);
  p.s1[6] = 0.2;
  EXPECT_EQ(select_cas(p, 2, 0.1, 0.6, SelectionMode::Threshold).spatial, (std::vector<int>{0, 3}));
}

TEST(SelectCas, JumpCutsAtLargestRatio) {
  auto p = synthetic(8);
  set_mi(p, 0, 4, 0.5);
  set_mi(p, 1, 5, 0.5);
  set_mi(p, 0, 6, 0.001);
  const auto sel = select_cas(p, 2, 0.0, 0.0, SelectionMode::Jump);
  EXPECT_EQ(sel.k, 4);
  EXPECT_EQ(sel.spatial, (std::vector<int>{0, 2}));
  EXPECT_DOUBLE_EQ(sel.jump_ratio, 500.0);
  EXPECT_DOUBLE_EQ(sel.jump_cut, 0.5);
  EXPECT_TRUE(sel.warnings.empty());
}

TEST(SelectCas, JumpFlatAndTied) {
  auto flat = synthetic(8);
  set_mi(flat, 0, 4, 0.3);
  set_mi(flat, 1, 6, 0.3);
  const auto a = select_cas(flat, 2, 0.0, 0.0, SelectionMode::Jump);
  EXPECT_TRUE(has(a.warnings, "NoJump"));
  EXPECT_EQ(a.k, 6);
  auto tied = synthetic(8);
  set_mi(tied, 0, 4, 1.0);
  set_mi(tied, 0, 6, 0.1);
  set_mi(tied, 1, 2, 0.01);
  const auto b = select_cas(tied, 2, 0.0, 0.0, SelectionMode::Jump);
  EXPECT_TRUE(has(b.warnings, "JumpTie"));
  EXPECT_EQ(b.spatial, (std::vector<int>{0, 2}));
}

TEST(SelectCas, JumpOnHubbardDimer) {
  const auto ints = fixtures::model("hubbard:2,1,8");
  const DeterminantSpace space(ints.basis());
  const auto p = mutual_information(ground_state(ints, space), space);
  const auto sel = select_cas(p, 2, 0.0, 0.0, SelectionMode::Jump);
  EXPECT_EQ(sel.k, 4);
}

TEST(SelectCas, RejectsNegativeThreshold) {
  EXPECT_THROW(select_cas(synthetic(8), 2, -0.1, 0.0, SelectionMode::Threshold), Error);
}
