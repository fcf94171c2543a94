#pragma once

// Small Hamiltonians shared by the unit tests and the acceptance gate.

#include <string>
#include <vector>

#include "oracle.hpp"
#include "tcc/workbench.hpp"

namespace fixtures {

struct Fixture {
  std::string name;
  tcc::IntegralSet ints;
};

inline tcc::IntegralSet model(const std::string& spec) {
  return tcc::generate_model_hamiltonian(tcc::parse_model_spec(spec));
}

/// Every fixture has K <= 8 spin-orbitals.
inline std::vector<Fixture> small() {
  return {
      {"hubbard:2,1,4", model("hubbard:2,1,4")},
      {"hubbard:3,1,2,2", model("hubbard:3,1,2,2")},
      {"hubbard:4,1,2", model("hubbard:4,1,2")},
      {"pairing:4,0.5,1", model("pairing:4,0.5,1")},
      {"random:4,2", oracle::random_integrals(4, 2, 7)},
  };
}

/// Fixtures with two electrons, where untruncated CC is exact.
inline std::vector<Fixture> two_electron() {
  return {
      {"hubbard:2,1,4", model("hubbard:2,1,4")},
      {"hubbard:3,1,2,2", model("hubbard:3,1,2,2")},
      {"pairing:3,0.5,1,2", model("pairing:3,0.5,1,2")},
      {"random:4,2", oracle::random_integrals(4, 2, 7)},
  };
}

}  // namespace fixtures
