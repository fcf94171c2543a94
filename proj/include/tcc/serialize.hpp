#pragma once

// JSON and TSV output. Reals are printed with 17 significant digits so that
// a double survives the round trip; non-finite values become null.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "tcc/amplitudes.hpp"
#include "tcc/determinant.hpp"
#include "tcc/diagnostics.hpp"
#include "tcc/entropy.hpp"
#include "tcc/error.hpp"
#include "tcc/exact_solvers.hpp"
#include "tcc/hamiltonian.hpp"
#include "tcc/tcc_solver.hpp"

namespace tcc {

inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

inline std::string format_real(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace detail {

inline void write_json(std::ostream& out, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(it.key()).dump() << ": ";
        write_json(out, it.value(), indent, depth + 1);
      }
      out << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      if (flat) {
        out << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out << ", ";
          write_json(out, j[i], indent, depth + 1);
        }
        out << "]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        write_json(out, j[i], indent, depth + 1);
      }
      out << "\n" << close << "]";
      return;
    }
    case Json::value_t::number_float:
      out << format_real(j.get<double>());
      return;
    default:
      out << j.dump();
  }
}

}  // namespace detail

inline std::string dump_json(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::write_json(os, j, indent, 0);
  os << "\n";
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------- converters

inline Json orbitals_json(Bits b) {
  Json a = Json::array();
  for (int p : bits_to_orbitals(b)) a.push_back(p + 1);
  return a;
}

inline Json real_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const SpectralSummary& s) {
  Json j;
  j["dimension"] = s.dimension;
  j["eigenvalues"] = s.eigenvalues;
  j["gap"] = real_or_null(s.gap);
  j["state"] = s.state;
  j["warnings"] = s.warnings;
  return j;
}

inline Json to_json(const CiVector& v, const DeterminantSpace& space) {
  Json j;
  j["basis"] = v.basis_tag;
  j["normalization"] = to_string(v.normalization);
  Json dets = Json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double c = v.coeffs[static_cast<Eigen::Index>(i)];
    if (c == 0.0) continue;
    dets.push_back(Json{{"occ", orbitals_json(space[i].bits())}, {"c", c}});
  }
  j["determinants"] = std::move(dets);
  return j;
}

inline Json to_json(const AmplitudeVector& t) {
  Json j;
  j["space"] = to_string(t.space());
  if (!t.truncation().empty()) j["truncation"] = t.truncation();
  Json entries = Json::array();
  for (const auto& [mu, v] : t.entries())
    entries.push_back(Json{{"holes", orbitals_json(mu.holes())}, {"particles", orbitals_json(mu.particles())}, {"t", v}});
  j["entries"] = std::move(entries);
  return j;
}

inline Json to_json(const TccResult& r) {
  Json j;
  j["converged"] = r.converged;
  j["status"] = r.status;
  j["iterations"] = r.iterations;
  j["energy"] = r.energy;
  j["dimension"] = r.set.size();
  if (!r.history.empty()) {
    j["residual_l2"] = r.history.back().residual_l2;
    j["residual_v"] = r.history.back().residual_v;
  }
  j["amplitudes"] = to_json(r.t);
  return j;
}

inline std::string history_tsv(const TccResult& r) {
  std::string s = "iteration\tresidual_l2\tresidual_v\tenergy\n";
  for (const auto& h : r.history)
    s += std::to_string(h.iteration) + "\t" + format_real(h.residual_l2) + "\t" + format_real(h.residual_v) + "\t" +
         format_real(h.energy) + "\n";
  return s;
}

inline Json to_json(const OrbitalEntropyProfile& p) {
  Json j;
  j["source"] = p.source;
  j["s1"] = std::vector<double>(p.s1.data(), p.s1.data() + p.s1.size());
  Json mi = Json::array();
  for (Eigen::Index i = 0; i < p.mi.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(p.mi.cols()));
    for (Eigen::Index c = 0; c < p.mi.cols(); ++c) row[static_cast<std::size_t>(c)] = p.mi(i, c);
    mi.push_back(row);
  }
  j["mutual_information"] = std::move(mi);
  return j;
}

/// One row per spin-orbital: s(i) followed by I(i, 1..K).
inline std::string profile_tsv(const OrbitalEntropyProfile& p) {
  std::string s = "orbital\ts";
  for (Eigen::Index c = 0; c < p.mi.cols(); ++c) s += "\tI_" + std::to_string(c + 1);
  s += "\n";
  for (Eigen::Index i = 0; i < p.mi.rows(); ++i) {
    s += std::to_string(i + 1) + "\t" + format_real(p.s1[i]);
    for (Eigen::Index c = 0; c < p.mi.cols(); ++c) s += "\t" + format_real(p.mi(i, c));
    s += "\n";
  }
  return s;
}

inline Json to_json(const CasSelection& c) {
  Json j;
  auto one_based = [](const std::vector<int>& v) {
    std::vector<int> out;
    for (int p : v) out.push_back(p + 1);
    return out;
  };
  j["k"] = c.k;
  j["spatial_orbitals"] = one_based(c.spatial);
  j["permutation"] = one_based(c.order);
  j["jump_ratio"] = c.jump_ratio;
  j["jump_cut"] = c.jump_cut;
  j["warnings"] = c.warnings;
  return j;
}

inline Json to_json(const GapReport& g) {
  Json j;
  j["eps0"] = real_or_null(g.eps0);
  j["eps0_ext"] = real_or_null(g.eps0_ext);
  j["homo_lumo"] = g.homo_lumo;
  j["min_eps_ext"] = real_or_null(g.min_eps_ext);
  j["ext_positive"] = g.ext_positive;
  j["flags"] = g.flags;
  return j;
}

inline Json to_json(const ProbeResult& p) {
  Json j;
  j["gamma_hat"] = real_or_null(p.gamma_hat);
  j["L_hat"] = p.L_hat;
  j["gamma_hat_l2"] = real_or_null(p.gamma_hat_l2);
  j["L_hat_l2"] = p.L_hat_l2;
  j["pairs"] = p.pairs;
  j["estimate"] = "sampled";
  return j;
}

inline Json to_json(const AssumptionReport& r) {
  Json j = to_json(r.gaps);
  j["omega0"] = r.omega0;
  j["omega_cas"] = r.omega_cas;
  j["lipschitz_star"] = r.lipschitz_star;
  j["margin"] = real_or_null(r.margin);
  j["gamma_hat"] = real_or_null(r.probe.gamma_hat);
  j["L_hat"] = r.probe.L_hat;
  j["gamma_hat_l2"] = real_or_null(r.probe.gamma_hat_l2);
  j["L_hat_l2"] = r.probe.L_hat_l2;
  j["samples"] = r.samples;
  j["pairs"] = r.probe.pairs;
  j["delta"] = r.delta;
  j["seed"] = r.seed;
  j["estimate"] = "sampled";
  return j;
}

inline Json to_json(const ErrorDecomposition& d) {
  Json j;
  j["truncation"] = d.truncation;
  j["cas_source"] = d.cas_source;
  j["noise"] = d.noise;
  j["seed"] = d.seed;
  j["e_fci"] = d.e_fci;
  j["e_cas_fci"] = d.e_cas_fci;
  j["e_tcc"] = d.e_tcc;
  j["dE"] = d.dE;
  j["d_eps"] = d.d_eps;
  j["d_eps_cas"] = d.d_eps_cas;
  j["d_eps_cas_star"] = d.d_eps_cas_star;
  j["dE_cas"] = d.dE_cas;
  j["triangle_slack"] = d.triangle_slack;
  j["t_star_vs_tilde"] = d.t_star_vs_tilde;
  return j;
}

inline Json to_json(const ScalingStudy& s) {
  Json j;
  j["linearized"] = s.linearized;
  j["slope"] = real_or_null(s.slope);
  j["fitted_points"] = s.fitted_points;
  Json rows = Json::array();
  for (const auto& r : s.rows)
    rows.push_back(Json{{"truncation", r.truncation},
                        {"dimension", r.dimension},
                        {"distance", r.distance},
                        {"d_eps", r.d_eps},
                        {"dual_distance", r.dual_distance},
                        {"remainder", r.remainder},
                        {"remainder_ratio", r.remainder_ratio}});
  j["rows"] = std::move(rows);
  return j;
}

/// Rows first, then a trailing comment line carrying the fitted slope.
inline std::string scaling_tsv(const ScalingStudy& s) {
  std::string out = "truncation\tdimension\tdistance\td_eps\tdual_distance\tremainder\tremainder_ratio\n";
  for (const auto& r : s.rows)
    out += r.truncation + "\t" + std::to_string(r.dimension) + "\t" + format_real(r.distance) + "\t" +
           format_real(r.d_eps) + "\t" + format_real(r.dual_distance) + "\t" + format_real(r.remainder) + "\t" +
           format_real(r.remainder_ratio) + "\n";
  out += "# slope\t" + format_real(s.slope) + "\n";
  return out;
}

}  // namespace tcc
