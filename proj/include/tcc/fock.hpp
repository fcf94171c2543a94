#pragma once

#include <Eigen/Dense>
#include <bit>
#include <string>
#include <vector>

#include "tcc/determinant.hpp"

namespace tcc {

/// Orbital energies from one Fock build at the reference.
struct FockSpectrum {
  Eigen::VectorXd lambda;   // lambda_p = f_pp, spin-orbital order
  double lambda0 = 0.0;     // sum of the N occupied lambda
  double off_diag_norm = 0.0;
  Eigen::MatrixXd matrix;   // full spin-orbital Fock matrix f_pq
  std::vector<std::string> warnings;

  static FockSpectrum from_diagonal(const Eigen::VectorXd& lambda, int n_electrons) {
    FockSpectrum f;
    f.lambda = lambda;
    f.lambda0 = lambda.head(n_electrons).sum();
    f.matrix = lambda.asDiagonal();
    return f;
  }

  /// Sum of lambda over an occupation string.
  double orbital_sum(Bits occ) const {
    double s = 0.0;
    while (occ) {
      s += lambda[std::countr_zero(occ)];
      occ &= occ - 1;
    }
    return s;
  }

  /// epsilon_mu = sum_j lambda_{A_j} - lambda_{I_j}.
  double epsilon(const Excitation& mu) const { return orbital_sum(mu.particles()) - orbital_sum(mu.holes()); }

  bool is_diagonal(double tol = 1e-8) const { return off_diag_norm <= tol; }
};

}  // namespace tcc
