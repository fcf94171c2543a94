#pragma once

// Excitation index sets and cluster-amplitude vectors.

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcc/determinant.hpp"
#include "tcc/error.hpp"
#include "tcc/fock.hpp"

namespace tcc {

/// Ordered, duplicate-free set of excitation indices with cached reference
/// phases: X_mu phi_0 = ref_sign(i) * target(i).
class ExcitationSet {
 public:
  ExcitationSet() = default;

  ExcitationSet(const OrbitalBasis& basis, std::vector<Excitation> items) : basis_(basis) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    items_ = std::move(items);
    index_.reserve(items_.size());
    signs_.reserve(items_.size());
    targets_.reserve(items_.size());
    const Determinant ref(basis.reference_bits());
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (!items_[i].valid_for(basis))
        fail(ErrorKind::InvalidArgument, "excitation " + items_[i].to_string() + " does not fit the basis");
      index_.emplace(items_[i], i);
      const auto hit = apply_excitation(items_[i], ref);
      signs_.push_back(hit->sign);
      targets_.push_back(hit->det);
    }
  }

  const OrbitalBasis& basis() const { return basis_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Excitation& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<Excitation>& items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  std::optional<std::size_t> find(const Excitation& mu) const {
    auto it = index_.find(mu);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(const Excitation& mu) const { return index_.count(mu) != 0; }

  int ref_sign(std::size_t i) const { return signs_[i]; }
  Determinant target(std::size_t i) const { return targets_[i]; }

  Eigen::VectorXd epsilons(const FockSpectrum& fock) const {
    Eigen::VectorXd eps(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) eps[i] = fock.epsilon(items_[i]);
    return eps;
  }

  /// Elements of this set that are absent from `other`.
  ExcitationSet minus(const ExcitationSet& other) const {
    std::vector<Excitation> rest;
    for (const auto& mu : items_)
      if (!other.contains(mu)) rest.push_back(mu);
    return ExcitationSet(basis_, std::move(rest));
  }

  /// Embeds a vector given on `sub` (a subset of this set) into this set.
  Eigen::VectorXd embed(const ExcitationSet& sub, const Eigen::VectorXd& values) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
    for (std::size_t i = 0; i < sub.size(); ++i) {
      auto j = find(sub[i]);
      if (!j) fail(ErrorKind::SpaceMismatch, "excitation " + sub[i].to_string() + " outside the target set");
      out[*j] = values[i];
    }
    return out;
  }

  /// Restriction of a vector on this set to `sub`.
  Eigen::VectorXd restrict_to(const ExcitationSet& sub, const Eigen::VectorXd& values) const {
    Eigen::VectorXd out(sub.size());
    for (std::size_t i = 0; i < sub.size(); ++i) {
      auto j = find(sub[i]);
      if (!j) fail(ErrorKind::SpaceMismatch, "excitation " + sub[i].to_string() + " outside the source set");
      out[i] = values[*j];
    }
    return out;
  }

 private:
  OrbitalBasis basis_;
  std::vector<Excitation> items_;
  std::unordered_map<Excitation, std::size_t, ExcitationHash> index_;
  std::vector<int> signs_;
  std::vector<Determinant> targets_;
};

/// All excitations of the basis split into CAS and external parts.
inline ExcitationSet full_excitation_set(const OrbitalBasis& basis) {
  return ExcitationSet(basis, enumerate_excitations(basis, basis.n_electrons));
}

inline ExcitationSet cas_excitation_set(const OrbitalBasis& basis, const BasisSplit& split) {
  std::vector<Excitation> out;
  for (const auto& mu : enumerate_excitations(basis, basis.n_electrons))
    if (classify_excitation(mu, split) == SpaceClass::Cas) out.push_back(mu);
  return ExcitationSet(basis, std::move(out));
}

inline ExcitationSet ext_excitation_set(const OrbitalBasis& basis, const BasisSplit& split) {
  std::vector<Excitation> out;
  for (const auto& mu : enumerate_excitations(basis, basis.n_electrons))
    if (classify_excitation(mu, split) == SpaceClass::Ext) out.push_back(mu);
  return ExcitationSet(basis, std::move(out));
}

enum class AmplitudeSpace { Full, Cas, Ext, Truncated };

inline std::string to_string(AmplitudeSpace s) {
  switch (s) {
    case AmplitudeSpace::Full: return "FULL";
    case AmplitudeSpace::Cas: return "CAS";
    case AmplitudeSpace::Ext: return "EXT";
    case AmplitudeSpace::Truncated: return "TRUNCATED";
  }
  return "?";
}

/// Sparse amplitude vector keyed by excitation index, iterated in canonical order.
class AmplitudeVector {
 public:
  AmplitudeVector() = default;
  explicit AmplitudeVector(AmplitudeSpace space, std::string truncation = {})
      : space_(space), truncation_(std::move(truncation)) {}

  AmplitudeSpace space() const { return space_; }
  const std::string& truncation() const { return truncation_; }

  void set(const Excitation& mu, double value) {
    if (value == 0.0)
      entries_.erase(mu);
    else
      entries_[mu] = value;
  }

  double get(const Excitation& mu) const {
    auto it = entries_.find(mu);
    return it == entries_.end() ? 0.0 : it->second;
  }

  const std::map<Excitation, double>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Drops entries with |t| <= tol.
  void prune(double tol = 0.0) {
    std::erase_if(entries_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
  }

  /// Throws SpaceMismatch when an entry contradicts the space tag.
  void check_space(const BasisSplit& split) const {
    for (const auto& [mu, t] : entries_) {
      const auto cls = classify_excitation(mu, split);
      if (space_ == AmplitudeSpace::Cas && cls != SpaceClass::Cas)
        fail(ErrorKind::SpaceMismatch, "external index " + mu.to_string() + " in a CAS amplitude vector");
      if ((space_ == AmplitudeSpace::Ext || space_ == AmplitudeSpace::Truncated) && cls != SpaceClass::Ext)
        fail(ErrorKind::SpaceMismatch, "CAS index " + mu.to_string() + " in an external amplitude vector");
    }
  }

  static AmplitudeVector from_dense(AmplitudeSpace space, const ExcitationSet& set, const Eigen::VectorXd& values,
                                    std::string truncation = {}) {
    if (static_cast<std::size_t>(values.size()) != set.size())
      fail(ErrorKind::DimensionMismatch, "amplitude values do not match the index set");
    AmplitudeVector t(space, std::move(truncation));
    for (std::size_t i = 0; i < set.size(); ++i) t.set(set[i], values[i]);
    return t;
  }

  /// Dense coefficients on `set`; entries outside it raise SpaceMismatch.
  Eigen::VectorXd to_dense(const ExcitationSet& set) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(set.size());
    for (const auto& [mu, t] : entries_) {
      auto i = set.find(mu);
      if (!i) fail(ErrorKind::SpaceMismatch, "amplitude " + mu.to_string() + " outside the index set");
      out[*i] = t;
    }
    return out;
  }

  double l2_norm() const {
    double s = 0.0;
    for (const auto& [mu, t] : entries_) s += t * t;
    return std::sqrt(s);
  }

 private:
  AmplitudeSpace space_ = AmplitudeSpace::Full;
  std::string truncation_;
  std::map<Excitation, double> entries_;
};

/// Weighted norm sqrt(sum eps_mu t_mu^2); every weight must be positive.
inline double v_ext_norm(const AmplitudeVector& t, const FockSpectrum& fock) {
  double s = 0.0;
  for (const auto& [mu, value] : t.entries()) {
    const double eps = fock.epsilon(mu);
    if (eps <= 0.0)
      fail(ErrorKind::NonPositiveWeight,
           "epsilon of " + mu.to_string() + " is " + std::to_string(eps) + "; the CAS-ext gap is violated");
    s += eps * value * value;
  }
  return std::sqrt(s);
}

/// Dense variant on a fixed index set with precomputed weights.
inline double weighted_norm(const Eigen::VectorXd& t, const Eigen::VectorXd& eps) {
  return std::sqrt((eps.array() * t.array().square()).sum());
}

/// Dual of the weighted norm: sqrt(sum f_mu^2 / eps_mu).
inline double weighted_dual_norm(const Eigen::VectorXd& f, const Eigen::VectorXd& eps) {
  return std::sqrt((f.array().square() / eps.array()).sum());
}

}  // namespace tcc
