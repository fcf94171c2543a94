#pragma once

// Umbrella header.

#include "tcc/amplitudes.hpp"
#include "tcc/cluster.hpp"
#include "tcc/determinant.hpp"
#include "tcc/diagnostics.hpp"
#include "tcc/entropy.hpp"
#include "tcc/error.hpp"
#include "tcc/exact_solvers.hpp"
#include "tcc/fcidump.hpp"
#include "tcc/fock.hpp"
#include "tcc/hamiltonian.hpp"
#include "tcc/integrals.hpp"
#include "tcc/models.hpp"
#include "tcc/serialize.hpp"
#include "tcc/tcc_solver.hpp"
