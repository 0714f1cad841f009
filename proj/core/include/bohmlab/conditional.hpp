#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bohmlab/grid.hpp"
#include "bohmlab/potential.hpp"
#include "bohmlab/propagator.hpp"

namespace bohmlab {

/// Default mass criterion for "macroscopically disjoint" environment supports.
inline constexpr double kSupportEpsilon = 1e-6;
/// Slices with norm below this are treated as null.
inline constexpr double kZeroSliceNorm = 1e-12;

/// Partition of grid coordinates into the subsystem (x) and its environment (y).
struct SubsystemSplit {
  std::vector<std::size_t> x_coords;
  std::vector<std::size_t> y_coords;

  /// Throws unless the two index sets are disjoint and cover 0..rank-1.
  void validate(std::size_t rank) const;
  /// Split taken from the wave function's coordinate roles.
  static SubsystemSplit from_roles(const GridWaveFunction& w);
};

enum class ConditionalStatus { ok, zero_conditional };

struct ConditionalResult {
  ConditionalStatus status = ConditionalStatus::ok;
  /// Normalized and phase-fixed slice over the x grid; zero amplitudes when
  /// status is zero_conditional.
  GridWaveFunction wave;
  /// L2 norm of the unnormalized slice psi(., Y).
  double slice_norm = 0.0;
};

/// psi(x) = Psi(x, Y), cubic-interpolated in y and renormalized.
ConditionalResult conditional_wavefunction(const GridWaveFunction& psi, const SubsystemSplit& split,
                                           std::span<const double> environment);

struct Branch {
  GridWaveFunction x_factor;  // normalized, phase-fixed
  GridWaveFunction y_factor;  // normalized
  Complex weight;
};

/// Psi = sum_i weight_i x_i (x) y_i + residual.
struct BranchDecomposition {
  std::vector<Branch> branches;  // descending |weight|
  GridWaveFunction residual;     // on the full grid
  /// min-sum overlap of the normalized y densities, branch x branch.
  std::vector<std::vector<double>> overlap;
  /// min-sum overlap of each branch's y density with the residual's y marginal.
  std::vector<double> residual_overlap;
  /// Global Schmidt coefficients across the x|y cut, descending.
  std::vector<double> schmidt_values;
  double epsilon = kSupportEpsilon;

  /// Sum of branches plus residual, on the full grid.
  GridWaveFunction reconstruct(const SubsystemSplit& split) const;
};

void to_json(nlohmann::json& j, const BranchDecomposition& d);

/// Schmidt decomposition across the x|y cut, localized to environment
/// support regions. The y grid is partitioned into regions seeded by the
/// connected components where the y marginal exceeds epsilon * its maximum
/// (every other cell joins the nearest seed). Each region's block of Psi is
/// SVD-decomposed; its leading Schmidt term is emitted as a branch and the
/// remainder goes to the residual. Branches are ordered by descending weight.
BranchDecomposition branch_decompose(const GridWaveFunction& psi, const SubsystemSplit& split,
                                     double epsilon = kSupportEpsilon);

/// Outer product x (x) y placed on the full grid of the split.
GridWaveFunction outer_product(const GridWaveFunction& x, const GridWaveFunction& y, const SubsystemSplit& split,
                               const Grid& full);

enum class EffectiveStatus { effective, conditional_only };
std::string_view to_string(EffectiveStatus s);

struct EffectiveResult {
  EffectiveStatus status = EffectiveStatus::conditional_only;
  /// Branch x-factor when effective, otherwise the conditional wave function.
  GridWaveFunction wave;
  /// Index of the selected branch, or -1.
  int branch = -1;
  double worst_overlap = 0.0;
};

/// Effective iff Y lies in the support of one branch's y-factor and that
/// branch's y mass overlaps every other branch and the residual by less than epsilon.
EffectiveResult detect_effective(const GridWaveFunction& psi, const SubsystemSplit& split,
                                 std::span<const double> environment, double epsilon = kSupportEpsilon);

struct AutonomyReport {
  std::vector<double> times;
  /// Phase-aligned L2 distance between the extracted conditional wave function
  /// and the independently evolved initial effective wave function.
  std::vector<double> distance;
  double max_distance = 0.0;
  double tolerance = 1e-4;
  bool autonomous = false;
  /// Times at which the conditional slice was null.
  std::vector<double> null_slices;
};

void to_json(nlohmann::json& j, const AutonomyReport& r);

/// Compares, frame by frame, the conditional wave function at Y(t_k) with the
/// Schrödinger evolution of the conditional wave function extracted at t_0
/// under the x part of `potential`. `environment_path[k]` is Y at frame k.
AutonomyReport schrodinger_autonomy_check(const WaveHistory& frames, const Potential& potential,
                                          const SubsystemSplit& split,
                                          std::span<const Configuration> environment_path, double tolerance = 1e-4);

}  // namespace bohmlab
