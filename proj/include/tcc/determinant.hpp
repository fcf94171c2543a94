#pragma once

// Occupation-number algebra: determinants as 64-bit occupation strings,
// excitation operators with fermionic phases, index enumeration and the
// CAS/external classification.
//
// Orbital indices are 0-based in code. Spin-orbital 2p is (spatial p, up),
// 2p+1 is (spatial p, down). The reference determinant occupies 0..N-1.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tcc/error.hpp"

namespace tcc {

using Bits = std::uint64_t;
inline constexpr int kMaxOrbitals = 64;

inline Bits bit(int p) { return Bits{1} << p; }

inline Bits low_mask(int n) { return n >= 64 ? ~Bits{0} : (Bits{1} << n) - 1; }

inline std::vector<int> bits_to_orbitals(Bits b) {
  std::vector<int> out;
  out.reserve(std::popcount(b));
  while (b) {
    out.push_back(std::countr_zero(b));
    b &= b - 1;
  }
  return out;
}

inline Bits orbitals_to_bits(const std::vector<int>& orbitals) {
  Bits b = 0;
  for (int p : orbitals) {
    if (p < 0 || p >= kMaxOrbitals) fail(ErrorKind::IndexOutOfRange, "orbital index " + std::to_string(p));
    if (b & bit(p)) fail(ErrorKind::InvalidArgument, "repeated orbital index " + std::to_string(p));
    b |= bit(p);
  }
  return b;
}

/// Lexicographic comparison of two equally sized sets given as bit strings,
/// i.e. comparison of their ascending index tuples.
inline std::strong_ordering lex_compare(Bits a, Bits b) {
  if (a == b) return std::strong_ordering::equal;
  const Bits diff = a ^ b;
  const Bits lowest = diff & (~diff + 1);
  return (a & lowest) ? std::strong_ordering::less : std::strong_ordering::greater;
}

/// Spin projection 2*Sz of an occupation string (even bits up, odd bits down).
inline int ms2_of(Bits b) {
  constexpr Bits kUp = 0x5555555555555555ULL;
  return std::popcount(b & kUp) - std::popcount(b & ~kUp);
}

struct OrbitalBasis {
  int n_orbitals = 0;   // K, spin-orbitals
  int n_electrons = 0;  // N
  // Restrict determinant and excitation spaces to the Sz sector of the reference.
  bool fixed_sz = false;
  std::vector<std::string> labels;

  static OrbitalBasis make(int n_orbitals, int n_electrons, bool fixed_sz = false) {
    if (n_orbitals > kMaxOrbitals)
      fail(ErrorKind::SizeLimit, "at most 64 spin-orbitals are supported, got " + std::to_string(n_orbitals));
    if (n_electrons <= 0 || n_electrons >= n_orbitals)
      fail(ErrorKind::InvalidArgument, "basis requires 0 < N < K, got K=" + std::to_string(n_orbitals) +
                                           " N=" + std::to_string(n_electrons));
    OrbitalBasis basis;
    basis.n_orbitals = n_orbitals;
    basis.n_electrons = n_electrons;
    basis.fixed_sz = fixed_sz;
    return basis;
  }

  Bits all_bits() const { return low_mask(n_orbitals); }
  Bits reference_bits() const { return low_mask(n_electrons); }
  int reference_ms2() const { return ms2_of(reference_bits()); }
  bool in_sector(Bits occ) const { return !fixed_sz || ms2_of(occ) == reference_ms2(); }
};

/// CAS = spin-orbitals 0..k-1, external = k..K-1.
struct BasisSplit {
  int k = 0;

  static BasisSplit make(const OrbitalBasis& basis, int k) {
    if (k < basis.n_electrons || k > basis.n_orbitals)
      fail(ErrorKind::InvalidArgument, "split requires N <= k <= K, got k=" + std::to_string(k));
    return BasisSplit{k};
  }

  Bits cas_bits() const { return low_mask(k); }
  bool is_cas_determinant(Bits occ) const { return (occ & ~cas_bits()) == 0; }
};

class Determinant {
 public:
  Determinant() = default;
  explicit Determinant(Bits occ) : bits_(occ) {}

  static Determinant from_orbitals(const std::vector<int>& orbitals) {
    return Determinant(orbitals_to_bits(orbitals));
  }

  Bits bits() const { return bits_; }
  int count() const { return std::popcount(bits_); }
  bool occupied(int p) const { return (bits_ >> p) & 1U; }
  std::vector<int> orbitals() const { return bits_to_orbitals(bits_); }

  friend bool operator==(Determinant a, Determinant b) { return a.bits_ == b.bits_; }
  friend std::strong_ordering operator<=>(Determinant a, Determinant b) {
    if (a.count() != b.count()) return a.count() <=> b.count();
    return lex_compare(a.bits_, b.bits_);
  }

  /// 1-based orbital list, e.g. "{1,2}".
  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int p : orbitals()) {
      if (!first) s += ",";
      s += std::to_string(p + 1);
      first = false;
    }
    return s + "}";
  }

 private:
  Bits bits_ = 0;
};

/// Multi-index mu = (I_1..I_r -> A_1..A_r). Holes and particles are paired by
/// ascending position; the operator is a+_{A1} a_{I1} ... a+_{Ar} a_{Ir}.
class Excitation {
 public:
  Excitation() = default;
  Excitation(Bits holes, Bits particles) : holes_(holes), particles_(particles) {
    if (std::popcount(holes) != std::popcount(particles))
      fail(ErrorKind::InvalidArgument, "excitation needs equally many holes and particles");
    if (holes == 0) fail(ErrorKind::InvalidArgument, "excitation rank must be at least 1");
    if (holes & particles) fail(ErrorKind::InvalidArgument, "holes and particles overlap");
  }

  static Excitation from_orbitals(const std::vector<int>& holes, const std::vector<int>& particles) {
    return Excitation(orbitals_to_bits(holes), orbitals_to_bits(particles));
  }

  Bits holes() const { return holes_; }
  Bits particles() const { return particles_; }
  int rank() const { return std::popcount(holes_); }
  std::vector<int> hole_list() const { return bits_to_orbitals(holes_); }
  std::vector<int> particle_list() const { return bits_to_orbitals(particles_); }

  /// True when every hole lies in the reference and every particle outside it.
  bool valid_for(const OrbitalBasis& basis) const {
    const Bits ref = basis.reference_bits();
    return (holes_ & ~ref) == 0 && (particles_ & ref) == 0 && (particles_ & ~basis.all_bits()) == 0;
  }

  friend bool operator==(const Excitation&, const Excitation&) = default;
  friend std::strong_ordering operator<=>(const Excitation& a, const Excitation& b) {
    if (a.rank() != b.rank()) return a.rank() <=> b.rank();
    if (auto c = lex_compare(a.holes_, b.holes_); c != 0) return c;
    return lex_compare(a.particles_, b.particles_);
  }

  std::string to_string() const {
    auto list = [](const std::vector<int>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i] + 1);
      return s;
    };
    return "(" + list(hole_list()) + "->" + list(particle_list()) + ")";
  }

 private:
  Bits holes_ = 0;
  Bits particles_ = 0;
};

struct ExcitationHash {
  std::size_t operator()(const Excitation& e) const noexcept {
    return std::hash<Bits>{}(e.holes() * 0x9E3779B97F4A7C15ULL ^ e.particles());
  }
};

// Fermionic sign rules: a_p and a+_p pick up (-1)^(number of occupied q < p).
inline bool annihilate(Bits& occ, int p, int& sign) {
  if (!(occ & bit(p))) return false;
  if (std::popcount(occ & low_mask(p)) & 1) sign = -sign;
  occ &= ~bit(p);
  return true;
}

inline bool create(Bits& occ, int p, int& sign) {
  if (occ & bit(p)) return false;
  if (std::popcount(occ & low_mask(p)) & 1) sign = -sign;
  occ |= bit(p);
  return true;
}

struct SignedDeterminant {
  Determinant det;
  int sign = 1;
};

/// X_mu applied to a determinant; empty when a hole is empty or a particle is
/// already occupied.
inline std::optional<SignedDeterminant> apply_excitation(const Excitation& mu, Determinant det) {
  Bits occ = det.bits();
  if ((occ & mu.holes()) != mu.holes() || (occ & mu.particles()) != 0) return std::nullopt;
  const auto holes = mu.hole_list();
  const auto particles = mu.particle_list();
  int sign = 1;
  // Rightmost pair acts first.
  for (std::size_t l = holes.size(); l-- > 0;) {
    annihilate(occ, holes[l], sign);
    create(occ, particles[l], sign);
  }
  return SignedDeterminant{Determinant(occ), sign};
}

inline int reference_sign(const Excitation& mu, const OrbitalBasis& basis) {
  return apply_excitation(mu, Determinant(basis.reference_bits()))->sign;
}

struct SignedExcitation {
  Excitation mu;
  int sign = 1;
};

/// Inverse of mu -> X_mu phi_0: returns mu and the sign with X_mu phi_0 = sign * det.
inline std::optional<SignedExcitation> excitation_from_reference(Determinant det, const OrbitalBasis& basis) {
  const Bits ref = basis.reference_bits();
  if (det.bits() == ref) return std::nullopt;
  if (det.count() != basis.n_electrons || (det.bits() & ~basis.all_bits()))
    fail(ErrorKind::InvalidArgument, "determinant " + det.to_string() + " is not in the basis");
  Excitation mu(ref & ~det.bits(), det.bits() & ~ref);
  return SignedExcitation{mu, apply_excitation(mu, Determinant(ref))->sign};
}

enum class SpaceClass { Cas, Ext };

inline SpaceClass classify_excitation(const Excitation& mu, const BasisSplit& split) {
  return (mu.particles() & ~split.cas_bits()) == 0 ? SpaceClass::Cas : SpaceClass::Ext;
}

/// Calls visit(bits) for every r-subset of `positions`, in lexicographic order.
template <class Visit>
void for_each_subset(const std::vector<int>& positions, int r, Visit&& visit) {
  const int n = static_cast<int>(positions.size());
  if (r < 0 || r > n) return;
  std::vector<int> idx(r);
  for (int i = 0; i < r; ++i) idx[i] = i;
  while (true) {
    Bits b = 0;
    for (int i : idx) b |= bit(positions[i]);
    visit(b);
    int i = r - 1;
    while (i >= 0 && idx[i] == n - r + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// All N-electron determinants over spin-orbitals 0..K-1 (or 0..k-1 when a
/// split is given), lexicographically ordered.
inline std::vector<Determinant> enumerate_determinants(const OrbitalBasis& basis,
                                                       std::optional<BasisSplit> restrict_to = std::nullopt) {
  const int upto = restrict_to ? restrict_to->k : basis.n_orbitals;
  std::vector<int> positions(upto);
  for (int p = 0; p < upto; ++p) positions[p] = p;
  std::vector<Determinant> dets;
  for_each_subset(positions, basis.n_electrons, [&](Bits b) {
    if (basis.in_sector(b)) dets.emplace_back(b);
  });
  return dets;
}

/// Excitation indices of rank 1..max_rank in canonical order (rank, holes, particles).
inline std::vector<Excitation> enumerate_excitations(const OrbitalBasis& basis, int max_rank) {
  std::vector<int> occ(basis.n_electrons);
  for (int i = 0; i < basis.n_electrons; ++i) occ[i] = i;
  std::vector<int> virt;
  for (int a = basis.n_electrons; a < basis.n_orbitals; ++a) virt.push_back(a);
  const int top = std::min({max_rank, basis.n_electrons, basis.n_orbitals - basis.n_electrons});
  const Bits ref = basis.reference_bits();
  std::vector<Excitation> out;
  for (int r = 1; r <= top; ++r) {
    for_each_subset(occ, r, [&](Bits holes) {
      for_each_subset(virt, r, [&](Bits particles) {
        if (basis.in_sector((ref & ~holes) | particles)) out.emplace_back(holes, particles);
      });
    });
  }
  return out;
}

}  // namespace tcc
