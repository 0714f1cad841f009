#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bohmlab/guidance.hpp"
#include "bohmlab/potential.hpp"
#include "bohmlab/propagator.hpp"

namespace bohmlab {

struct Trajectory {
  std::vector<double> times;
  std::vector<Configuration> configurations;
  std::uint64_t seed = 0;
  /// Integration stopped before the last frame (node or step underflow).
  bool truncated = false;
  std::string diagnostic;

  std::size_t size() const { return times.size(); }
};

struct Ensemble {
  std::vector<Trajectory> members;
  /// Identifies the generating experiment (spec hash or name).
  std::string source;

  std::size_t size() const { return members.size(); }
  /// Positions of all members at stamp index i.
  std::vector<Configuration> positions_at(std::size_t i) const;
};

/// Integrator settings for the guiding equation.
struct IntegratorOptions {
  double node_fraction = kNodeFraction;
  /// Sub-steps are halved on node proximity down to frame_step / 2^max_halvings.
  int max_halvings = 10;
  /// Frame indices at which configurations are recorded; every frame when empty.
  std::vector<std::size_t> record_frames;
};

/// RK4 integration of dQ/dt = v(Q, t) over every frame of `history`, starting
/// from q0 at the first frame. Configurations are recorded at frame times.
Trajectory integrate_trajectory(const GuidanceField& field, const Configuration& q0,
                                const IntegratorOptions& options = {});

/// Evolves w0 to t_end with step dt and integrates a single trajectory.
Trajectory integrate_trajectory(const GridWaveFunction& w0, const Potential& p, const Configuration& q0,
                                double t_end, double dt, const IntegratorOptions& options = {});

/// Born-sampled initial configurations (member i uses member_seed(seed, i))
/// integrated against the history.
Ensemble bohm_ensemble(const WaveHistory& history, std::size_t members, std::uint64_t seed, unsigned threads = 1,
                       const IntegratorOptions& options = {});

/// Ensemble from explicit initial configurations.
Ensemble bohm_ensemble(const WaveHistory& history, const std::vector<Configuration>& initial, unsigned threads = 1,
                       const IntegratorOptions& options = {});

/// Largest displacement between consecutive stamps.
double max_step(const Trajectory& t);
/// Mean displacement between consecutive stamps.
double mean_step(const Trajectory& t);

}  // namespace bohmlab
