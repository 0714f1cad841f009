#pragma once

#include <span>
#include <vector>

#include "bohmlab/grid.hpp"
#include "bohmlab/propagator.hpp"

namespace bohmlab {

/// Node threshold relative to max |psi|: velocities are not evaluated where
/// |psi(q)| < kNodeFraction * max |psi|.
inline constexpr double kNodeFraction = 1e-8;

struct VelocitySample {
  std::vector<double> velocity;
  /// |psi(q)| fell below the node threshold; velocity is left empty.
  bool near_node = false;
};

/// Guiding velocity v_d = Im(d_d psi / psi) at q (hbar = m = 1), using a
/// spectral gradient and cubic interpolation to the off-grid point.
VelocitySample guiding_velocity(const GridWaveFunction& w, std::span<const double> q,
                                double node_fraction = kNodeFraction);

/// Velocity field of a stored history: psi and its gradient are interpolated
/// cubically in space and linearly in time between frames.
class GuidanceField {
 public:
  explicit GuidanceField(const WaveHistory& history, double node_fraction = kNodeFraction);

  VelocitySample velocity(std::span<const double> q, double t) const;
  /// Velocity from a single frame.
  VelocitySample velocity_at_frame(std::span<const double> q, std::size_t frame) const;
  const WaveHistory& history() const { return *history_; }

 private:
  void sample_frame(std::size_t frame, std::span<const double> q, std::span<Complex> out) const;
  const WaveHistory* history_;
  double node_fraction_;
};

}  // namespace bohmlab
