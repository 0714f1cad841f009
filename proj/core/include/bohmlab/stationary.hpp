#pragma once

#include <cstddef>
#include <vector>

#include "bohmlab/potential.hpp"

namespace bohmlab {

struct Eigenpair {
  double energy = 0.0;
  GridWaveFunction state;
};

/// Lowest `count` eigenpairs of the dense spectral Hamiltonian
/// H = F^-1 (k^2 / 2) F + V on the potential's grid. Eigenvectors are real,
/// normalized, and phase-fixed. Intended for grids up to a few thousand points.
std::vector<Eigenpair> hamiltonian_eigenstates(const Potential& potential, std::size_t count);

/// Eigenvector of the split-step map of step dt closest to the index-th
/// Hamiltonian eigenstate (0 = ground state). Stepping it with the same dt
/// changes only its global phase, to rounding.
GridWaveFunction split_step_stationary_state(const Potential& potential, std::size_t index, double dt);

}  // namespace bohmlab
