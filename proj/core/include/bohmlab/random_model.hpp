#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bohmlab/ontic_model.hpp"

namespace bohmlab {

class InfeasibleTarget : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Measurements a generated {|0>, |+>} model must reproduce.
enum class DeclaredMeasurements { z_and_x, none };

/// Largest achievable overlap: 1/2 with Z and X declared (inclusive), below 1 otherwise.
double max_feasible_overlap(DeclaredMeasurements declared);

/// Smallest ontic space that realizes `overlap_target`.
std::size_t minimum_ontic_count(double overlap_target, DeclaredMeasurements declared);

/// Standard-mode model for {|0>, |+>} over `n_ontic` ontic states whose
/// preparations overlap by exactly `overlap_target` (min-sum) and which is
/// consistent for the declared measurements. Ontic states carry deterministic
/// (Z, X) outcomes; the mass beyond the minimal construction is split at
/// random among copies, which leaves overlap and consistency unchanged.
/// Throws InfeasibleTarget for an unreachable target or too small an ontic space.
OntologicalModel random_epistemic_model(double overlap_target, std::size_t n_ontic, std::uint64_t seed,
                                        DeclaredMeasurements declared = DeclaredMeasurements::z_and_x);

/// Standard-mode model consistent for every catalog measurement. Ontic states
/// are outcome tuples (one outcome per measurement, answered deterministically),
/// each duplicated `copies` times; each preparation is a random coupling of the
/// state's Born marginals fitted by iterative proportional scaling.
OntologicalModel random_consistent_model(std::vector<NamedState> states, std::vector<NamedMeasurement> measurements,
                                         std::size_t copies, std::uint64_t seed);

}  // namespace bohmlab
