#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bohmlab/grid.hpp"
#include "bohmlab/potential.hpp"
#include "bohmlab/propagator.hpp"
#include "bohmlab/random.hpp"
#include "bohmlab/trajectory.hpp"

namespace bohmlab {

/// Inverse-CDF sampler for |psi|^2 over the flattened grid. A drawn cell is
/// refined by a uniform offset within [-dx/2, dx/2) on every coordinate and
/// wrapped into the periodic domain.
class BornSampler {
 public:
  explicit BornSampler(const GridWaveFunction& w);

  Configuration sample(Rng& rng) const;
  /// Index of the cell chosen for a uniform u in [0, 1).
  std::size_t cell_for(double u) const;
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  std::vector<double> cdf_;
};

/// One configuration drawn from |psi|^2.
Configuration born_sample(const GridWaveFunction& w, std::uint64_t seed);

/// Configurations drawn uniformly over the whole grid domain (control ensembles).
std::vector<Configuration> uniform_sample(const Grid& grid, std::size_t count, std::uint64_t seed);

/// Random discontinuous motion: an independent Born draw from |psi(., t)|^2
/// at every sample time. `dt` bounds the wave-evolution step.
Trajectory rdmp_trajectory(const GridWaveFunction& w0, const Potential& p, std::span<const double> sample_times,
                           std::uint64_t seed, double dt);

/// RDMP ensemble over the frames of a history; member i uses member_seed(seed, i)
/// and is sampled at `frames` (all frames when empty).
Ensemble rdmp_ensemble(const WaveHistory& history, std::size_t members, std::uint64_t seed, unsigned threads = 1,
                       std::span<const std::size_t> frames = {});

}  // namespace bohmlab
