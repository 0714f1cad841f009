#pragma once

#include <memory>
#include <span>
#include <vector>

#include "bohmlab/diagnostics.hpp"
#include "bohmlab/grid.hpp"
#include "bohmlab/potential.hpp"

namespace bohmlab {

/// Strang split-step Fourier propagator for i d/dt psi = (-1/2 Laplacian + V) psi
/// on a periodic grid (hbar = m = 1). One step is
///   exp(-i V dt/2) F^-1 exp(-i k^2 dt/2) F exp(-i V dt/2).
/// Stepping is const and may be called from several threads at once.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const Potential& potential, double dt);
  ~SplitStepPropagator();
  SplitStepPropagator(SplitStepPropagator&&) noexcept;
  SplitStepPropagator& operator=(SplitStepPropagator&&) noexcept;

  double dt() const { return dt_; }
  const Grid& grid() const { return grid_; }

  void step(std::span<Complex> amplitudes) const;
  GridWaveFunction step(const GridWaveFunction& w) const;

 private:
  struct Plans;
  Grid grid_;
  double dt_;
  std::vector<Complex> half_potential_phase_;
  std::vector<Complex> kinetic_phase_;
  std::unique_ptr<Plans> plans_;
};

/// One split-step of length dt. Appends a warning to `diagnostics` when the
/// state has appreciable weight near the grid's momentum cutoff.
GridWaveFunction evolve_step(const GridWaveFunction& w, const Potential& p, double dt,
                             Diagnostics* diagnostics = nullptr);

/// Fraction of momentum-space probability in the outer `band` of each axis'
/// wavenumber range.
double spectral_edge_fraction(const GridWaveFunction& w, double band = 0.1);

/// Momentum-edge weight above which evolve_step warns.
inline constexpr double kSpectralEdgeWarning = 1e-6;

/// Wavenumbers 2 pi m / L in FFT order for one axis.
std::vector<double> fft_wavenumbers(const Axis& axis);

/// Spectral partial derivative d psi / d x_axis (Nyquist mode dropped).
std::vector<Complex> spectral_derivative(const Grid& grid, std::span<const Complex> amplitudes, std::size_t axis);

/// Immutable sequence of evolved frames psi(t_k) with optional spectral gradients.
class WaveHistory {
 public:
  struct Frame {
    double time = 0.0;
    std::vector<Complex> psi;
    std::vector<std::vector<Complex>> gradient;  // one field per coordinate, or empty
    double max_modulus = 0.0;
  };

  /// Frames at t = k h, k = 0..n, with n = round(t_end / dt) and h = t_end / n.
  static WaveHistory evolve(const GridWaveFunction& initial, const Potential& potential, double dt,
                            double t_end, bool with_gradients);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return frames_.size(); }
  const Frame& frame(std::size_t i) const { return frames_[i]; }
  const std::vector<Frame>& frames() const { return frames_; }
  double step() const { return step_; }
  double end_time() const { return frames_.back().time; }
  bool has_gradients() const { return !frames_.front().gradient.empty(); }
  std::vector<double> times() const;

  GridWaveFunction wave(std::size_t i) const;
  /// Frame index whose time equals t within 1e-9 * max(1, t); throws otherwise.
  std::size_t frame_at(double t) const;

 private:
  Grid grid_;
  double step_ = 0.0;
  std::vector<Frame> frames_;
};

}  // namespace bohmlab
