#pragma once

// Molpro-style FCIDUMP reader and writer.
//
// Records are `value i j k l` with 1-based spatial indices:
//   i j k l > 0    two-electron (ij|kl), chemists' notation
//   i j 0 0        one-electron h_ij
//   i 0 0 0        orbital energy
//   0 0 0 0        core energy

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "tcc/error.hpp"
#include "tcc/integrals.hpp"

namespace tcc {

inline constexpr double kDuplicateTolerance = 1e-12;

namespace detail {

inline std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

inline bool parse_real(std::string token, double& out) {
  for (auto& c : token)
    if (c == 'D' || c == 'd') c = 'E';
  const char* begin = token.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end != begin && *end == '\0';
}

inline bool parse_int(const std::string& token, long& out) {
  const char* begin = token.c_str();
  char* end = nullptr;
  out = std::strtol(begin, &end, 10);
  return end != begin && *end == '\0';
}

/// Splits the namelist body into KEY -> list of value tokens.
inline std::map<std::string, std::vector<std::string>> parse_namelist(const std::string& body) {
  std::map<std::string, std::vector<std::string>> out;
  std::string key;
  std::string current;
  auto flush_value = [&] {
    if (!current.empty()) {
      if (key.empty()) fail(ErrorKind::MalformedHeader, "value '" + current + "' before any key");
      out[key].push_back(current);
      current.clear();
    }
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c == '=') {
      // The identifier preceding '=' is the new key.
      std::string ident = current;
      current.clear();
      if (ident.empty()) fail(ErrorKind::MalformedHeader, "'=' without a key");
      key = upper(ident);
      if (out.count(key)) fail(ErrorKind::MalformedHeader, "key " + key + " given twice");
      out[key];
    } else if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      // A token directly followed by '=' is a key, not a value.
      std::size_t j = i;
      while (j < body.size() && std::isspace(static_cast<unsigned char>(body[j]))) ++j;
      if (j < body.size() && body[j] == '=') continue;
      flush_value();
    } else {
      current += c;
    }
  }
  flush_value();
  return out;
}

inline long header_int(const std::map<std::string, std::vector<std::string>>& nl, const std::string& key,
                       std::optional<long> fallback) {
  auto it = nl.find(key);
  if (it == nl.end() || it->second.empty()) {
    if (fallback) return *fallback;
    fail(ErrorKind::MalformedHeader, "missing " + key);
  }
  if (it->second.size() != 1) fail(ErrorKind::MalformedHeader, key + " must be a single integer");
  long v = 0;
  if (!parse_int(it->second.front(), v)) fail(ErrorKind::MalformedHeader, key + " is not an integer");
  return v;
}

}  // namespace detail

inline IntegralSet parse_fcidump(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string up = detail::upper(text);

  const auto start = up.find("&FCI");
  if (start == std::string::npos) fail(ErrorKind::MalformedHeader, "no &FCI namelist");
  std::size_t stop = up.find("&END", start);
  std::size_t body_end = stop;
  std::size_t records_begin = stop == std::string::npos ? std::string::npos : stop + 4;
  if (stop == std::string::npos) {
    stop = up.find('/', start);
    if (stop == std::string::npos) fail(ErrorKind::MalformedHeader, "namelist is not terminated");
    body_end = stop;
    records_begin = stop + 1;
  }
  const auto nl = detail::parse_namelist(text.substr(start + 4, body_end - start - 4));

  const long norb = detail::header_int(nl, "NORB", std::nullopt);
  const long nelec = detail::header_int(nl, "NELEC", std::nullopt);
  if (norb <= 0) fail(ErrorKind::MalformedHeader, "NORB must be positive");
  if (nelec <= 0 || nelec >= 2 * norb) fail(ErrorKind::MalformedHeader, "NELEC must lie in 1..2*NORB-1");
  if (2 * norb > kMaxOrbitals) fail(ErrorKind::SizeLimit, "NORB exceeds 32");

  IntegralSet ints(static_cast<int>(norb));
  ints.source = IntegralSource::Fcidump;
  ints.n_electrons = static_cast<int>(nelec);
  ints.ms2 = static_cast<int>(detail::header_int(nl, "MS2", 0));
  ints.isym = static_cast<int>(detail::header_int(nl, "ISYM", 1));
  if (auto it = nl.find("ORBSYM"); it != nl.end()) {
    std::vector<int> sym;
    for (const auto& tok : it->second) {
      long v = 0;
      if (!detail::parse_int(tok, v) || v < 1 || v > 8) fail(ErrorKind::MalformedHeader, "bad ORBSYM entry " + tok);
      sym.push_back(static_cast<int>(v));
    }
    ints.set_orbsym(std::move(sym));
  }

  // Canonical key -> value, for duplicate detection.
  std::map<std::tuple<int, int, int, int>, double> seen;
  auto record = [&](std::tuple<int, int, int, int> key, double v) {
    auto [it, inserted] = seen.emplace(key, v);
    if (!inserted && std::abs(it->second - v) > kDuplicateTolerance) {
      auto [a, b, c, d] = key;
      fail(ErrorKind::DuplicateCanonicalEntry, "conflicting values for (" + std::to_string(a) + " " +
                                                   std::to_string(b) + " " + std::to_string(c) + " " +
                                                   std::to_string(d) + ")");
    }
  };

  std::istringstream records(text.substr(records_begin));
  std::string line;
  int line_no = 0;
  while (std::getline(records, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 5) fail(ErrorKind::MalformedRecord, "record line " + std::to_string(line_no) + ": " + line);
    double v = 0.0;
    long idx[4];
    if (!detail::parse_real(tok[0], v)) fail(ErrorKind::MalformedRecord, "bad value '" + tok[0] + "'");
    for (int n = 0; n < 4; ++n) {
      if (!detail::parse_int(tok[n + 1], idx[n])) fail(ErrorKind::MalformedRecord, "bad index '" + tok[n + 1] + "'");
      if (idx[n] < 0 || idx[n] > norb)
        fail(ErrorKind::IndexOutOfRange, "index " + tok[n + 1] + " outside 0.." + std::to_string(norb));
    }
    const int i = static_cast<int>(idx[0]), j = static_cast<int>(idx[1]);
    const int k = static_cast<int>(idx[2]), l = static_cast<int>(idx[3]);
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      record({0, 0, 0, 0}, v);
      ints.e_core = v;
    } else if (i > 0 && j > 0 && k > 0 && l > 0) {
      int a = std::max(i, j), b = std::min(i, j), c = std::max(k, l), d = std::min(k, l);
      if (std::pair(a, b) < std::pair(c, d)) {
        std::swap(a, c);
        std::swap(b, d);
      }
      record({a, b, c, d}, v);
      ints.set_g(i - 1, j - 1, k - 1, l - 1, v);
    } else if (i > 0 && j > 0 && k == 0 && l == 0) {
      record({std::max(i, j), std::min(i, j), 0, 0}, v);
      ints.set_h(i - 1, j - 1, v);
    } else if (i > 0 && j == 0 && k == 0 && l == 0) {
      record({i, 0, 0, -1}, v);
      if (ints.orbital_energies.empty()) ints.orbital_energies.assign(norb, 0.0);
      ints.orbital_energies[i - 1] = v;
    } else {
      fail(ErrorKind::MalformedRecord, "unrecognised index pattern: " + line);
    }
  }
  return ints;
}

inline IntegralSet parse_fcidump_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  return parse_fcidump(in);
}

/// Writes canonical entries only, in ascending compound index order:
/// two-electron, one-electron, orbital energies, core energy.
inline void write_fcidump(std::ostream& out, const IntegralSet& ints) {
  const int n = ints.n_spatial();
  char buf[96];
  out << " &FCI NORB=" << n << ",NELEC=" << ints.n_electrons << ",MS2=" << ints.ms2 << ",\n  ORBSYM=";
  for (int s : ints.orbsym()) out << s << ",";
  out << "\n  ISYM=" << ints.isym << ",\n &END\n";
  auto line = [&](double v, int i, int j, int k, int l) {
    std::snprintf(buf, sizeof buf, "%24.16E %4d %4d %4d %4d\n", v, i, j, k, l);
    out << buf;
  };
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= i; ++j)
      for (int k = 1; k <= i; ++k)
        for (int l = 1; l <= (k == i ? j : k); ++l) {
          const double v = ints.g(i - 1, j - 1, k - 1, l - 1);
          if (v != 0.0) line(v, i, j, k, l);
        }
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= i; ++j) {
      const double v = ints.h(i - 1, j - 1);
      if (v != 0.0) line(v, i, j, 0, 0);
    }
  for (std::size_t i = 0; i < ints.orbital_energies.size(); ++i)
    line(ints.orbital_energies[i], static_cast<int>(i) + 1, 0, 0, 0);
  line(ints.e_core, 0, 0, 0, 0);
}

inline void write_fcidump_file(const std::string& path, const IntegralSet& ints) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  write_fcidump(out, ints);
}

}  // namespace tcc
