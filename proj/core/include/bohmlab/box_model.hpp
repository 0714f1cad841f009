#pragma once

#include <cstddef>
#include <vector>

#include "bohmlab/ontic_model.hpp"

namespace bohmlab {

/// Revised-mode model of a particle in the unit box. Ontic states are the
/// position cells [j/n, (j+1)/n); the catalog holds the first n_levels energy
/// eigenstates as basis vectors, each prepared with the cell masses of
/// 2 sin^2(E pi x), and the "energy" measurement answers E with certainty.
OntologicalModel build_box_nomological_model(std::size_t n_levels, std::size_t n_positions);

/// E^2 pi^2 / 2 for E = 1..n_levels.
std::vector<double> box_energies(std::size_t n_levels);

/// Cell masses of 2 sin^2(E pi x) on n equal cells of [0, 1].
std::vector<double> box_eigenstate_cell_masses(std::size_t level, std::size_t n_positions);

/// Revised-mode box-style model for {|0>, |+>}: |0> is the lowest box level, |+>
/// the equal superposition of the two lowest levels, prepared with their cell
/// position masses. Responses are Born probabilities of the prepared state for
/// the Z and X measurements. With one cell the two preparations coincide.
OntologicalModel box_style_qubit_model(std::size_t n_positions);

}  // namespace bohmlab
