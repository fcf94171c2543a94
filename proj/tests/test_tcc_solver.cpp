#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace tcc;

namespace {

struct Exact {
  double energy;
  AmplitudeVector t;
};

Exact exact_cluster(const IntegralSet& ints) {
  const auto basis = ints.basis();
  const DeterminantSpace space(basis);
  const auto res = fci_solve(ints, basis);
  return {res.summary.eigenvalues[0], ci_to_cluster(res.states[0], space)};
}

AmplitudeVector cas_amplitudes(const IntegralSet& ints, const BasisSplit& split) {
  const DeterminantSpace full(ints.basis());
  const auto cas = cas_fci_solve(ints, full, split);
  return ci_to_cluster(cas.states[0], full, AmplitudeSpace::Cas);
}

TccConfig config(const std::string& trunc = "full") {
  TccConfig c;
  c.truncation = TruncationScheme::parse(trunc);
  c.tolerance = 1e-11;
  c.diis = 6;
  return c;
}

}  // namespace

TEST(Truncation, ParseAndPrint) {
  EXPECT_EQ(TruncationScheme::parse("sd").to_string(), "rank:2");
  EXPECT_EQ(TruncationScheme::parse("rank:3").to_string(), "rank:3");
  EXPECT_EQ(TruncationScheme::parse("foi:1").to_string(), "foi:1");
  EXPECT_EQ(TruncationScheme::parse("full").to_string(), "full");
  for (const char* bad : {"rank:", "rank:0", "rank:2x", "foi:-1", "cisd", ""}) {
    try {
      TruncationScheme::parse(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
  }
}

TEST(Truncation, SpaceSizesAreNested) {
  const auto basis = OrbitalBasis::make(10, 4);
  const auto split = BasisSplit::make(basis, 6);
  const auto full = enumerate_truncated_space(split, TruncationScheme::full(), basis);
  std::size_t prev = 0;
  for (int n = 1; n <= 4; ++n) {
    const auto r = enumerate_truncated_space(split, TruncationScheme::rank(n), basis);
    EXPECT_GT(r.size(), prev);
    prev = r.size();
    for (const auto& mu : r) {
      EXPECT_LE(mu.rank(), n);
      EXPECT_TRUE(full.contains(mu));
    }
  }
  EXPECT_EQ(prev, full.size());
  // foi:n keeps at most n particles outside the CAS; foi:2 covers everything here.
  const auto f1 = enumerate_truncated_space(split, TruncationScheme::foi(1), basis);
  for (const auto& mu : f1) EXPECT_LE(std::popcount(mu.particles() & ~split.cas_bits()), 1);
  EXPECT_EQ(enumerate_truncated_space(split, TruncationScheme::foi(4), basis).size(), full.size());
  // Count of the external space: all excitations minus the CAS ones.
  std::size_t all = 0, cas = 0;
  for (int r = 1; r <= 4; ++r) {
    all += oracle::binomial(4, r) * oracle::binomial(6, r);
    cas += oracle::binomial(4, r) * oracle::binomial(2, r);
  }
  EXPECT_EQ(full.size(), all - cas);
}

TEST(TccResidual, ExactAmplitudesSolveEverySplit) {
  for (const auto& fx : fixtures::small()) {
    const auto basis = fx.ints.basis();
    const auto ex = exact_cluster(fx.ints);
    for (int k = basis.n_electrons + 1; k < basis.n_orbitals; ++k) {
      const auto split = BasisSplit::make(basis, k);
      const TccProblem p(fx.ints, basis, split);
      const auto [t_cas, t_ext] = split_amplitudes(ex.t, split);
      const auto f = tcc_residual(t_ext, t_cas, p, TruncationScheme::full());
      double worst = 0.0;
      for (const auto& [mu, v] : f.entries()) worst = std::max(worst, std::abs(v));
      EXPECT_LE(worst, 1e-9) << fx.name << " k=" << k;
      EXPECT_NEAR(tcc_energy(t_ext, t_cas, p), ex.energy, 1e-10) << fx.name << " k=" << k;
    }
  }
}

TEST(TccResidual, FirstOrderAtZeroMatchesOracle) {
  const auto ints = fixtures::model("hubbard:3,1,2,2");
  const auto basis = ints.basis();
  const auto split = BasisSplit::make(basis, 4);
  const TccProblem p(ints, basis, split);
  const auto f = tcc_residual(AmplitudeVector(AmplitudeSpace::Ext), AmplitudeVector(AmplitudeSpace::Cas), p,
                              TruncationScheme::full());
  const oracle::Ladder L(6);
  const Eigen::MatrixXd h(L.hamiltonian(ints));
  const Eigen::Index ref = static_cast<Eigen::Index>(basis.reference_bits());
  for (const auto& mu : p.ext_set()) {
    // <X_mu phi_0, H phi_0>
    const double want = (Eigen::MatrixXd(L.excitation(mu)).col(ref)).dot(h.col(ref));
    EXPECT_NEAR(f.get(mu), want, 1e-13) << mu.to_string();
  }
  EXPECT_NEAR(tcc_energy(AmplitudeVector(AmplitudeSpace::Ext), AmplitudeVector(AmplitudeSpace::Cas), p), h(ref, ref),
              1e-13);
}

TEST(TccResidual, RejectsMislabelledAmplitudes) {
  const auto ints = fixtures::model("hubbard:3,1,2,2");
  const auto basis = ints.basis();
  const auto split = BasisSplit::make(basis, 4);
  const TccProblem p(ints, basis, split);
  AmplitudeVector bad_cas(AmplitudeSpace::Cas);
  bad_cas.set(Excitation::from_orbitals({0}, {5}), 0.1);
  try {
    tcc_residual(AmplitudeVector(AmplitudeSpace::Ext), bad_cas, p, TruncationScheme::full());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpaceMismatch);
  }
}

TEST(SolveTcc, TwoElectronFullCcIsExact) {
  for (const auto& fx : fixtures::two_electron()) {
    const auto basis = fx.ints.basis();
    const auto split = BasisSplit::make(basis, basis.n_electrons);
    const TccProblem p(fx.ints, basis, split);
    const auto res = solve_tcc(p, AmplitudeVector(AmplitudeSpace::Cas), config());
    ASSERT_TRUE(res.converged) << fx.name;
    EXPECT_NEAR(res.energy, exact_cluster(fx.ints).energy, 1e-9) << fx.name;
  }
}

TEST(SolveTcc, FullExternalSpaceRecoversFci) {
  for (const char* spec : {"hubbard:4,1,2", "pairing:4,0.5,1"}) {
    const auto ints = fixtures::model(spec);
    const auto basis = ints.basis();
    const auto split = BasisSplit::make(basis, 6);
    const TccProblem p(ints, basis, split);
    // With t_cas taken from the exact state the full external solve is exact.
    const auto ex = exact_cluster(ints);
    const auto t_cas = split_amplitudes(ex.t, split).first;
    const auto res = solve_tcc(p, t_cas, config());
    ASSERT_TRUE(res.converged) << spec;
    EXPECT_NEAR(res.energy, ex.energy, 1e-9) << spec;
  }
}

TEST(SolveTcc, WholeSpaceAsCasGivesCasEnergy) {
  const auto ints = fixtures::model("hubbard:4,1,2");
  const auto basis = ints.basis();
  const auto split = BasisSplit::make(basis, basis.n_orbitals);
  const TccProblem p(ints, basis, split);
  const auto t_cas = cas_amplitudes(ints, split);
  const auto res = solve_tcc(p, t_cas, config());
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.set.size(), 0u);
  EXPECT_TRUE(res.t.empty());
  EXPECT_NEAR(res.energy, fci_solve(ints, basis).summary.eigenvalues[0], 1e-10);
}

TEST(SolveTcc, CasEnergyIsReproducedWithoutExternalAmplitudes) {
  const auto ints = fixtures::model("pairing:4,0.5,1");
  const auto basis = ints.basis();
  const auto split = BasisSplit::make(basis, 6);
  const TccProblem p(ints, basis, split);
  const auto t_cas = cas_amplitudes(ints, split);
  const double e_cas = cas_fci_solve(ints, DeterminantSpace(basis), split).summary.eigenvalues[0];
  EXPECT_NEAR(tcc_energy(AmplitudeVector(AmplitudeSpace::Ext), t_cas, p), e_cas, 1e-12);
}

TEST(SolveTcc, SdImprovesOnCas) {
  const auto ints = fixtures::model("hubbard:4,1,2");
  const auto basis = ints.basis();
  const auto split = BasisSplit::make(basis, 6);
  const TccProblem p(ints, basis, split);
  const auto t_cas = cas_amplitudes(ints, split);
  const double e_fci = fci_solve(ints, basis).summary.eigenvalues[0];
  const double e_cas = cas_fci_solve(ints, p.space(), split).summary.eigenvalues[0];
  const auto res = solve_tcc(p, t_cas, config("sd"));
  ASSERT_TRUE(res.converged);
  EXPECT_LT(std::abs(res.energy - e_fci), 0.1 * std::abs(e_cas - e_fci));
  EXPECT_EQ(res.t.truncation(), "rank:2");
  for (const auto& [mu, v] : res.t.entries()) EXPECT_LE(mu.rank(), 2);
}

TEST(SolveTcc, SolverVariantsAgree) {
  const auto ints = fixtures::model("pairing:4,0.5,1");
  const auto basis = ints.basis();
  const auto split = BasisSplit::make(basis, 6);
  const TccProblem p(ints, basis, split);
  const auto t_cas = cas_amplitudes(ints, split);
  auto plain = config("sd");
  plain.diis = 0;
  auto damped = plain;
  damped.damping = 0.7;
  auto newton = plain;
  newton.newton = true;
  const auto a = solve_tcc(p, t_cas, plain);
  const auto b = solve_tcc(p, t_cas, damped);
  const auto c = solve_tcc(p, t_cas, newton);
  const auto d = solve_tcc(p, t_cas, config("sd"));
  for (const auto* r : {&a, &b, &c, &d}) {
    ASSERT_TRUE(r->converged);
    EXPECT_NEAR(r->energy, a.energy, 1e-10);
    EXPECT_LE((r->t_dense - a.t_dense).cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_LT(c.iterations, a.iterations);
  EXPECT_LT(a.iterations, b.iterations);
}

TEST(SolveTcc, HistoryIsConsistent) {
  const auto ints = fixtures::model("hubbard:4,1,2");
  const auto basis = ints.basis();
  const auto split = BasisSplit::make(basis, 6);
  const TccProblem p(ints, basis, split);
  const auto res = solve_tcc(p, cas_amplitudes(ints, split), config("sd"));
  ASSERT_EQ(res.history.size(), static_cast<std::size_t>(res.iterations) + 1);
  for (std::size_t i = 0; i < res.history.size(); ++i) EXPECT_EQ(res.history[i].iteration, static_cast<int>(i));
  EXPECT_EQ(res.history.back().energy, res.energy);
  EXPECT_LE(res.history.back().residual_l2, 1e-11);
}

TEST(SolveTcc, MaxIterationsReported) {
  const auto ints = fixtures::model("hubbard:4,1,2");
  const auto basis = ints.basis();
  const auto split = BasisSplit::make(basis, 6);
  const TccProblem p(ints, basis, split);
  auto c = config("sd");
  c.max_iterations = 2;
  const auto res = solve_tcc(p, cas_amplitudes(ints, split), c);
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.status, "max_iterations");
  EXPECT_EQ(res.iterations, 2);
}

TEST(SolveTcc, GapViolation) {
  IntegralSet ints(2);
  ints.n_electrons = 2;
  ints.ms2 = 0;
  ints.set_h(0, 0, 1.0);
  ints.set_h(1, 1, -1.0);
  const auto basis = ints.basis();
  const TccProblem p(ints, basis, BasisSplit::make(basis, 2));
  try {
    solve_tcc(p, AmplitudeVector(AmplitudeSpace::Cas), config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GapViolation);
  }
}

TEST(SolveTcc, InvalidConfig) {
  const auto ints = fixtures::model("hubbard:2,1,4");
  const auto basis = ints.basis();
  const TccProblem p(ints, basis, BasisSplit::make(basis, 2));
  for (auto mutate : {+[](TccConfig& c) { c.damping = 0.0; }, +[](TccConfig& c) { c.damping = 1.5; },
                      +[](TccConfig& c) { c.tolerance = -1.0; }, +[](TccConfig& c) { c.diis = -1; }}) {
    auto c = config();
    mutate(c);
    EXPECT_THROW(solve_tcc(p, AmplitudeVector(AmplitudeSpace::Cas), c), Error);
  }
}
