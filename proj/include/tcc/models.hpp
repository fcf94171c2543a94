#pragma once

// Built-in model Hamiltonians: open-chain Hubbard and a reduced-BCS style
// pairing model. Both return spatial integrals with the default filling N = L.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "tcc/error.hpp"
#include "tcc/integrals.hpp"

namespace tcc {

inline constexpr int kMaxModelSites = 10;

struct HubbardSpec {
  int sites = 2;
  double hopping = 1.0;
  double u = 0.0;
  std::optional<int> nelec;
  // Transform to the tight-binding eigenbasis. The bare site basis usually has
  // a non-positive CAS-ext gap.
  bool orbital_basis = true;
};

struct PairingSpec {
  int levels = 4;
  double g = 0.0;
  double spacing = 1.0;
  std::optional<int> nelec;
};

using ModelSpec = std::variant<HubbardSpec, PairingSpec>;

namespace detail {

inline int model_electrons(int sites, std::optional<int> nelec) {
  const int n = nelec.value_or(sites);
  if (n <= 0 || n >= 2 * sites) fail(ErrorKind::InvalidArgument, "electron count must lie in 1..2L-1");
  return n;
}

inline void check_sites(int sites) {
  if (sites < 1) fail(ErrorKind::InvalidArgument, "model needs at least one site");
  if (sites > kMaxModelSites)
    fail(ErrorKind::SizeLimit, "models are limited to " + std::to_string(kMaxModelSites) + " spatial orbitals");
}

// Reference Sz of the first N spin-orbitals.
inline int reference_ms2(int n) { return n % 2; }

}  // namespace detail

inline IntegralSet hubbard_model(const HubbardSpec& spec) {
  detail::check_sites(spec.sites);
  const int L = spec.sites;
  IntegralSet ints(L);
  ints.source = IntegralSource::Model;
  ints.n_electrons = detail::model_electrons(L, spec.nelec);
  ints.ms2 = detail::reference_ms2(ints.n_electrons);

  Eigen::MatrixXd hop = Eigen::MatrixXd::Zero(L, L);
  for (int i = 0; i + 1 < L; ++i) hop(i, i + 1) = hop(i + 1, i) = -spec.hopping;

  if (!spec.orbital_basis) {
    for (int p = 0; p < L; ++p)
      for (int q = 0; q <= p; ++q) ints.set_h(p, q, hop(p, q));
    for (int i = 0; i < L; ++i) ints.set_g(i, i, i, i, spec.u);
    return ints;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hop);
  Eigen::MatrixXd c = es.eigenvectors();
  // Deterministic phase: largest-magnitude component positive, first one on ties.
  for (int p = 0; p < L; ++p) {
    int best = 0;
    for (int i = 1; i < L; ++i)
      if (std::abs(c(i, p)) > std::abs(c(best, p)) + 1e-12) best = i;
    if (c(best, p) < 0) c.col(p) *= -1.0;
  }
  const Eigen::MatrixXd h = c.transpose() * hop * c;
  for (int p = 0; p < L; ++p)
    for (int q = 0; q <= p; ++q) ints.set_h(p, q, std::abs(h(p, q)) < 1e-14 ? 0.0 : h(p, q));
  for (int p = 0; p < L; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r <= p; ++r)
        for (int s = 0; s <= r; ++s) {
          double v = 0.0;
          for (int i = 0; i < L; ++i) v += c(i, p) * c(i, q) * c(i, r) * c(i, s);
          v *= spec.u;
          if (std::abs(v) < 1e-14) v = 0.0;
          ints.set_g(p, q, r, s, v);
        }
  return ints;
}

/// Levels e_p = p * spacing (p = 0..L-1), pair scattering -g P+_p P_q.
/// With 8-fold symmetric storage the pair-hopping integral (pq|pq) drags in
/// its exchange partner (pq|qp) as well; both are set to -g.
inline IntegralSet pairing_model(const PairingSpec& spec) {
  detail::check_sites(spec.levels);
  const int L = spec.levels;
  IntegralSet ints(L);
  ints.source = IntegralSource::Model;
  ints.n_electrons = detail::model_electrons(L, spec.nelec);
  ints.ms2 = detail::reference_ms2(ints.n_electrons);
  for (int p = 0; p < L; ++p) ints.set_h(p, p, p * spec.spacing);
  for (int p = 0; p < L; ++p) {
    ints.set_g(p, p, p, p, -spec.g);
    for (int q = 0; q < p; ++q) ints.set_g(p, q, p, q, -spec.g);
  }
  return ints;
}

inline IntegralSet generate_model_hamiltonian(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> IntegralSet {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, HubbardSpec>)
          return hubbard_model(s);
        else
          return pairing_model(s);
      },
      spec);
}

/// "hubbard:L,t,U[,nelec]", "hubbard-site:L,t,U[,nelec]" or "pairing:L,g,spacing[,nelec]".
inline ModelSpec parse_model_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) fail(ErrorKind::InvalidArgument, "model spec needs KIND:ARGS, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  std::vector<std::string> args;
  std::stringstream ss(text.substr(colon + 1));
  for (std::string item; std::getline(ss, item, ',');) args.push_back(item);
  if (args.size() < 3 || args.size() > 4)
    fail(ErrorKind::InvalidArgument, "model spec '" + text + "' needs 3 or 4 arguments");

  auto as_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) fail(ErrorKind::InvalidArgument, "'" + s + "' is not an integer");
    return v;
  };
  auto as_real = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) fail(ErrorKind::InvalidArgument, "'" + s + "' is not a number");
    return v;
  };
  std::optional<int> nelec;
  if (args.size() == 4) nelec = as_int(args[3]);

  if (kind == "hubbard" || kind == "hubbard-site") {
    HubbardSpec h{as_int(args[0]), as_real(args[1]), as_real(args[2]), nelec, kind == "hubbard"};
    return h;
  }
  if (kind == "pairing") return PairingSpec{as_int(args[0]), as_real(args[1]), as_real(args[2]), nelec};
  fail(ErrorKind::InvalidArgument, "unknown model kind '" + kind + "'");
}

}  // namespace tcc
