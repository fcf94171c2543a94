#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "tcc/determinant.hpp"
#include "tcc/error.hpp"

namespace tcc {

enum class IntegralSource { Fcidump, Model };

/// Spatial one- and two-electron integrals. Two-electron integrals are in
/// chemists' notation (pq|rs) and stored densely with all eight permutations
/// filled, so every access sees the canonical value.
class IntegralSet {
 public:
  IntegralSet() = default;

  explicit IntegralSet(int n_spatial)
      : n_(n_spatial),
        h_(Eigen::MatrixXd::Zero(n_spatial, n_spatial)),
        g_(static_cast<std::size_t>(n_spatial) * n_spatial * n_spatial * n_spatial, 0.0),
        orbsym_(n_spatial, 1) {
    if (n_spatial <= 0) fail(ErrorKind::InvalidArgument, "need at least one spatial orbital");
    if (2 * n_spatial > kMaxOrbitals)
      fail(ErrorKind::SizeLimit, "at most 32 spatial orbitals are supported, got " + std::to_string(n_spatial));
  }

  int n_spatial() const { return n_; }
  int n_spin_orbitals() const { return 2 * n_; }

  double h(int p, int q) const { return h_(p, q); }
  void set_h(int p, int q, double v) {
    h_(p, q) = v;
    h_(q, p) = v;
  }
  const Eigen::MatrixXd& h_matrix() const { return h_; }

  double g(int p, int q, int r, int s) const { return g_[idx(p, q, r, s)]; }
  void set_g(int p, int q, int r, int s, double v) {
    for (auto [a, b, c, d] : {std::array{p, q, r, s}, std::array{q, p, r, s}, std::array{p, q, s, r},
                              std::array{q, p, s, r}, std::array{r, s, p, q}, std::array{s, r, p, q},
                              std::array{r, s, q, p}, std::array{s, r, q, p}})
      g_[idx(a, b, c, d)] = v;
  }

  // Spin-orbital access; spin-orbital P has spatial P/2 and spin P%2.
  double h_so(int p, int q) const { return (p & 1) == (q & 1) ? h_(p >> 1, q >> 1) : 0.0; }

  /// Physicists' <pq|rs> over spin-orbitals.
  double g_so(int p, int q, int r, int s) const {
    if ((p & 1) != (r & 1) || (q & 1) != (s & 1)) return 0.0;
    return g(p >> 1, r >> 1, q >> 1, s >> 1);
  }

  /// Antisymmetrized <pq||rs>.
  double g_anti(int p, int q, int r, int s) const { return g_so(p, q, r, s) - g_so(p, q, s, r); }

  double e_core = 0.0;
  int n_electrons = 0;
  int ms2 = 0;
  int isym = 1;
  IntegralSource source = IntegralSource::Model;
  std::vector<double> orbital_energies;  // optional, as found in the file

  const std::vector<int>& orbsym() const { return orbsym_; }
  void set_orbsym(std::vector<int> sym) {
    if (static_cast<int>(sym.size()) != n_) fail(ErrorKind::MalformedHeader, "ORBSYM length differs from NORB");
    orbsym_ = std::move(sym);
  }

  OrbitalBasis basis(bool fixed_sz = true) const {
    auto b = OrbitalBasis::make(n_spin_orbitals(), n_electrons, fixed_sz);
    return b;
  }

  /// Integrals in a new spatial order: new orbital p is old orbital order[p].
  IntegralSet permuted(const std::vector<int>& order) const {
    if (static_cast<int>(order.size()) != n_) fail(ErrorKind::DimensionMismatch, "permutation length");
    std::vector<int> seen(n_, 0);
    for (int p : order) {
      if (p < 0 || p >= n_ || seen[p]++) fail(ErrorKind::InvalidArgument, "not a permutation");
    }
    IntegralSet out(n_);
    out.e_core = e_core;
    out.n_electrons = n_electrons;
    out.ms2 = ms2;
    out.isym = isym;
    out.source = source;
    for (int p = 0; p < n_; ++p) {
      out.orbsym_[p] = orbsym_[order[p]];
      for (int q = 0; q < n_; ++q) {
        out.h_(p, q) = h_(order[p], order[q]);
        for (int r = 0; r < n_; ++r)
          for (int s = 0; s < n_; ++s) out.g_[out.idx(p, q, r, s)] = g(order[p], order[q], order[r], order[s]);
      }
    }
    if (!orbital_energies.empty()) {
      out.orbital_energies.resize(n_);
      for (int p = 0; p < n_; ++p) out.orbital_energies[p] = orbital_energies[order[p]];
    }
    return out;
  }

 private:
  std::size_t idx(int p, int q, int r, int s) const {
    return ((static_cast<std::size_t>(p) * n_ + q) * n_ + r) * n_ + s;
  }

  int n_ = 0;
  Eigen::MatrixXd h_;
  std::vector<double> g_;
  std::vector<int> orbsym_;
};

}  // namespace tcc
